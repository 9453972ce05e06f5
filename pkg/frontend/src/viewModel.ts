/** DOM-free view models for the results pane and facet sidebar. */

import { parseSnippet, SnippetSpan } from "./snippet.js";
import { FacetField, SearchResponse } from "./types.js";

export interface HitView {
  docId: string;
  pageNo: number;
  score: number;
  snippetParts: SnippetSpan[];
}

export interface FacetValueView {
  value: string;
  count: number;
  active: boolean;
}

export interface FacetGroupView {
  field: FacetField;
  label: string;
  values: FacetValueView[];
}

export interface ResultsView {
  total: number;
  noResults: boolean;
  hits: HitView[];
  facets: FacetGroupView[];
}

const FACET_LABELS: Record<FacetField, string> = {
  doc_type: "Document type",
  subject: "Subject",
};

export function resultsView(
  response: SearchResponse,
  active: Partial<Record<FacetField, string | null>> = {},
): ResultsView {
  const hits = response.hits.map((hit) => ({
    docId: hit.doc_id,
    pageNo: hit.page_no,
    score: hit.score,
    snippetParts: parseSnippet(hit.snippet),
  }));
  const facets: FacetGroupView[] = (Object.keys(FACET_LABELS) as FacetField[]).map((field) => ({
    field,
    label: FACET_LABELS[field],
    values: Object.entries(response.facets[field] ?? {})
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([value, count]) => ({ value, count, active: active[field] === value })),
  }));
  return { total: response.total, noResults: response.total === 0, hits, facets };
}
