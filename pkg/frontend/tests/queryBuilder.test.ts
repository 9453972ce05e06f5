import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { canonicalJson } from "../src/canonical.js";
import {
  activeFilterSummary,
  buildQuery,
  emptyForm,
  QueryFormState,
  setFacet,
} from "../src/queryBuilder.js";

const FIG1_FIXTURE = readFileSync(new URL("./fixtures/fig1_query.json", import.meta.url), "utf-8").trim();

function fig1Form(): QueryFormState {
  const form = emptyForm();
  form.entities.ART = "urn";
  form.entities.CON = "cremation";
  form.startYear = "-2000";
  form.endYear = "-800";
  form.fulltext = "upside down";
  return form;
}

describe("buildQuery", () => {
  it("reproduces the recorded reference query byte for byte", () => {
    const built = buildQuery(fig1Form());
    expect(built.ok).toBe(true);
    if (built.ok) {
      expect(canonicalJson(built.query)).toBe(FIG1_FIXTURE);
    }
  });

  it("maps an all-empty form to the match-all body {}", () => {
    const built = buildQuery(emptyForm());
    expect(built.ok).toBe(true);
    if (built.ok) {
      expect(built.query).toEqual({});
      expect(canonicalJson(built.query)).toBe("{}");
    }
  });

  it("rejects non-integer years with a field error and no query", () => {
    const form = fig1Form();
    form.startYear = "abc";
    const built = buildQuery(form);
    expect(built.ok).toBe(false);
    if (!built.ok) {
      expect(built.errors.startYear).toMatch(/integer/);
    }
  });

  it("requires both years once either is set", () => {
    const form = emptyForm();
    form.startYear = "-100";
    const built = buildQuery(form);
    expect(built.ok).toBe(false);
    if (!built.ok) expect(built.errors.endYear).toBeDefined();
  });

  it("rejects a start year after the end year", () => {
    const form = emptyForm();
    form.startYear = "100";
    form.endYear = "-100";
    const built = buildQuery(form);
    expect(built.ok).toBe(false);
  });

  it("carries the overlap date mode through", () => {
    const form = fig1Form();
    form.dateMode = "overlap";
    const built = buildQuery(form);
    expect(built.ok && built.query.date?.mode).toBe("overlap");
  });

  it("splits comma-separated entity terms", () => {
    const form = emptyForm();
    form.entities.ART = "urn, pot , ";
    const built = buildQuery(form);
    expect(built.ok && built.query.entities?.ART).toEqual(["urn", "pot"]);
  });

  it("turns a full bounding box into a 4-vertex polygon", () => {
    const form = emptyForm();
    form.bbox = { west: "5.0", south: "51.0", east: "7.0", north: "53.0" };
    const built = buildQuery(form);
    expect(built.ok).toBe(true);
    if (built.ok) {
      expect(built.query.polygon).toEqual([
        [5, 51],
        [7, 51],
        [7, 53],
        [5, 53],
      ]);
    }
  });

  it("rejects a partial bounding box", () => {
    const form = emptyForm();
    form.bbox.west = "5.0";
    const built = buildQuery(form);
    expect(built.ok).toBe(false);
    if (!built.ok) expect(built.errors["bbox.east"]).toBeDefined();
  });

  it("rejects non-numeric bounding box values", () => {
    const form = emptyForm();
    form.bbox = { west: "left", south: "51", east: "7", north: "53" };
    const built = buildQuery(form);
    expect(built.ok).toBe(false);
  });

  it("omits the default page window and keeps custom ones", () => {
    expect(buildQuery(emptyForm())).toEqual({ ok: true, query: {} });
    const form = emptyForm();
    form.pageFrom = 10;
    const built = buildQuery(form);
    expect(built.ok && built.query.page).toEqual({ from: 10, size: 10 });
  });

  it("includes selected facet values", () => {
    const form = setFacet(emptyForm(), "doc_type", "excavation");
    const built = buildQuery(form);
    expect(built.ok && built.query.facets).toEqual({ doc_type: "excavation" });
  });

  it("never invents filter values: every term in the body is in the form", () => {
    const form = fig1Form();
    form.entities.LOC = "swifterbant";
    form.docType = "excavation";
    const built = buildQuery(form);
    expect(built.ok).toBe(true);
    if (!built.ok) return;
    for (const [etype, terms] of Object.entries(built.query.entities ?? {})) {
      for (const term of terms) {
        expect(form.entities[etype as keyof typeof form.entities]).toContain(term);
      }
    }
    expect(form.fulltext).toContain(built.query.fulltext ?? "");
    expect(built.query.facets?.doc_type).toBe(form.docType);
  });

  it("is injective on distinct non-empty forms (modulo omission rules)", () => {
    const variants: QueryFormState[] = [
      fig1Form(),
      (() => {
        const f = fig1Form();
        f.entities.ART = "pot";
        return f;
      })(),
      (() => {
        const f = fig1Form();
        f.dateMode = "overlap";
        return f;
      })(),
      (() => {
        const f = fig1Form();
        f.fulltext = "right side up";
        return f;
      })(),
      setFacet(fig1Form(), "subject", "burial"),
    ];
    const bodies = variants.map((form) => {
      const built = buildQuery(form);
      expect(built.ok).toBe(true);
      return built.ok ? canonicalJson(built.query) : "";
    });
    expect(new Set(bodies).size).toBe(variants.length);
  });
});

describe("activeFilterSummary", () => {
  it("lists every active filter for the no-results state", () => {
    const form = setFacet(fig1Form(), "doc_type", "excavation");
    const summary = activeFilterSummary(form);
    expect(summary).toContain("ART: urn");
    expect(summary).toContain("CON: cremation");
    expect(summary).toContain("fulltext: upside down");
    expect(summary).toContain("doc_type: excavation");
    expect(summary.join(" ")).toContain("-2000..-800");
  });

  it("is empty for the match-all form", () => {
    expect(activeFilterSummary(emptyForm())).toEqual([]);
  });
});

describe("setFacet", () => {
  it("resets paging when a facet changes", () => {
    const form = emptyForm();
    form.pageFrom = 30;
    expect(setFacet(form, "subject", "burial").pageFrom).toBe(0);
  });

  it("clears a facet with null", () => {
    const form = setFacet(emptyForm(), "doc_type", "survey");
    expect(setFacet(form, "doc_type", null).docType).toBeNull();
  });
});
