/**
 * Form state -> query wire body.
 *
 * Every form field is free text; building either returns a QueryBody with
 * all empty fields omitted (an all-empty form gives {}), or field-keyed
 * validation errors -- in which case no request may be sent.
 */

import { DateMode, ENTITY_TYPES, EntityType, FacetField, QueryBody } from "./types.js";

export interface QueryFormState {
  entities: Record<EntityType, string>;
  startYear: string;
  endYear: string;
  dateMode: DateMode;
  fulltext: string;
  docType: string | null;
  subject: string | null;
  bbox: { west: string; south: string; east: string; north: string };
  pageFrom: number;
  pageSize: number;
}

export const DEFAULT_PAGE_SIZE = 10;

export function emptyForm(): QueryFormState {
  return {
    entities: { ART: "", CON: "", LOC: "", MAT: "", PER: "", SPE: "" },
    startYear: "",
    endYear: "",
    dateMode: "contain",
    fulltext: "",
    docType: null,
    subject: null,
    bbox: { west: "", south: "", east: "", north: "" },
    pageFrom: 0,
    pageSize: DEFAULT_PAGE_SIZE,
  };
}

export type FieldErrors = Partial<Record<string, string>>;

export type BuildResult =
  | { ok: true; query: QueryBody }
  | { ok: false; errors: FieldErrors };

const INTEGER_RE = /^-?\d+$/;

function parseYear(raw: string, field: string, errors: FieldErrors): number | undefined {
  const text = raw.trim();
  if (text === "") return undefined;
  if (!INTEGER_RE.test(text)) {
    errors[field] = "must be an integer year (negative for BCE)";
    return undefined;
  }
  return parseInt(text, 10);
}

function parseCoord(raw: string, field: string, errors: FieldErrors): number | undefined {
  const text = raw.trim();
  if (text === "") return undefined;
  const value = Number(text);
  if (!Number.isFinite(value)) {
    errors[field] = "must be a number";
    return undefined;
  }
  return value;
}

export function buildQuery(form: QueryFormState): BuildResult {
  const errors: FieldErrors = {};
  const query: QueryBody = {};

  const entities: QueryBody["entities"] = {};
  for (const etype of ENTITY_TYPES) {
    const terms = form.entities[etype]
      .split(",")
      .map((t) => t.trim())
      .filter((t) => t.length > 0);
    if (terms.length > 0) entities[etype] = terms;
  }
  if (Object.keys(entities).length > 0) query.entities = entities;

  const start = parseYear(form.startYear, "startYear", errors);
  const end = parseYear(form.endYear, "endYear", errors);
  if (start !== undefined || end !== undefined) {
    if (start === undefined && !errors["startYear"]) errors["startYear"] = "both years are needed for a date filter";
    if (end === undefined && !errors["endYear"]) errors["endYear"] = "both years are needed for a date filter";
    if (start !== undefined && end !== undefined && start > end) {
      errors["endYear"] = "end year must not be before the start year";
    }
    if (start !== undefined && end !== undefined && !errors["startYear"] && !errors["endYear"]) {
      query.date = { mode: form.dateMode, start, end };
    }
  }

  const fulltext = form.fulltext.trim();
  if (fulltext) query.fulltext = fulltext;

  const facets: QueryBody["facets"] = {};
  if (form.docType) facets.doc_type = form.docType;
  if (form.subject) facets.subject = form.subject;
  if (Object.keys(facets).length > 0) query.facets = facets;

  const west = parseCoord(form.bbox.west, "bbox.west", errors);
  const south = parseCoord(form.bbox.south, "bbox.south", errors);
  const east = parseCoord(form.bbox.east, "bbox.east", errors);
  const north = parseCoord(form.bbox.north, "bbox.north", errors);
  const coords = [west, south, east, north];
  const given = coords.filter((c) => c !== undefined).length;
  if (given > 0 && given < 4) {
    for (const [field, value] of [
      ["bbox.west", west],
      ["bbox.south", south],
      ["bbox.east", east],
      ["bbox.north", north],
    ] as const) {
      if (value === undefined && !errors[field]) errors[field] = "all four bounds are needed for a bounding box";
    }
  }
  if (west !== undefined && south !== undefined && east !== undefined && north !== undefined) {
    // wire format: a 4-vertex polygon, counter-clockwise from the south-west
    query.polygon = [
      [west, south],
      [east, south],
      [east, north],
      [west, north],
    ];
  }

  if (form.pageFrom !== 0 || form.pageSize !== DEFAULT_PAGE_SIZE) {
    query.page = { from: form.pageFrom, size: form.pageSize };
  }

  if (Object.keys(errors).length > 0) return { ok: false, errors };
  return { ok: true, query };
}

/** Human-readable list of the filters a form state sends (for the no-results view). */
export function activeFilterSummary(form: QueryFormState): string[] {
  const built = buildQuery(form);
  if (!built.ok) return [];
  const query = built.query;
  const parts: string[] = [];
  for (const [etype, terms] of Object.entries(query.entities ?? {})) {
    parts.push(`${etype}: ${terms.join(", ")}`);
  }
  if (query.date) parts.push(`date ${query.date.mode}s ${query.date.start}..${query.date.end}`);
  if (query.fulltext) parts.push(`fulltext: ${query.fulltext}`);
  for (const [field, value] of Object.entries(query.facets ?? {})) {
    parts.push(`${field}: ${value}`);
  }
  if (query.polygon) parts.push("within bounding box");
  return parts;
}

export function setFacet(form: QueryFormState, field: FacetField, value: string | null): QueryFormState {
  const next = { ...form, pageFrom: 0 };
  if (field === "doc_type") next.docType = value;
  else next.subject = value;
  return next;
}
