#!/usr/bin/env python3
"""End-to-end search demo on the packaged fixture pages.

Builds an index in a temporary directory, runs the recorded reference query
(urn + cremation, year range containing -2000..-800, full text "upside
down"), and prints the ranked result.  Pass --serve to keep the HTTP API
running on the built index afterwards.
"""

import argparse
import json
import pathlib
import sys
import tempfile

from greylit.search import Query, SearchIndex, read_page_records

FIXTURES = pathlib.Path(__file__).parent.parent / "tests" / "fixtures"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pages", default=FIXTURES / "pages.jsonl")
    parser.add_argument("--query", default=FIXTURES / "fig1_query.json")
    parser.add_argument("--serve", action="store_true", help="serve the index over HTTP afterwards")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args()

    index = SearchIndex()
    count = index.index_pages(read_page_records(pathlib.Path(args.pages).read_text(encoding="utf-8")))
    print(f"indexed {count} pages")

    payload = json.loads(pathlib.Path(args.query).read_text(encoding="utf-8"))
    print("query:", json.dumps(payload, sort_keys=True))
    result = index.execute(Query.from_json(payload))
    print(f"total hits: {result.total}")
    for hit in result.hits:
        print(f"  {hit.doc_id} p.{hit.page_no}  score {hit.score:.3f}")
        print(f"    {hit.snippet}")
    print("facets:", {f: dict(c) for f, c in result.facets.items()})

    if args.serve:
        import uvicorn

        from greylit.service import create_app

        with tempfile.TemporaryDirectory() as tmp:
            index.save(tmp)
            print(f"serving on http://127.0.0.1:{args.port} (POST /search, POST /index, GET /health)")
            uvicorn.run(create_app(index, index_dir=tmp), host="127.0.0.1", port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
