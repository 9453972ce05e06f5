/** Wire types for the search service (field names are part of the API). */

export type EntityType = "ART" | "CON" | "LOC" | "MAT" | "PER" | "SPE";

export const ENTITY_TYPES: EntityType[] = ["ART", "CON", "LOC", "MAT", "PER", "SPE"];

export const ENTITY_LABELS: Record<EntityType, string> = {
  ART: "Artefact",
  CON: "Context",
  LOC: "Location",
  MAT: "Material",
  PER: "Period",
  SPE: "Species",
};

export type DateMode = "contain" | "overlap";

export interface DateFilter {
  mode: DateMode;
  start: number;
  end: number;
}

export type FacetField = "doc_type" | "subject";

export interface QueryBody {
  entities?: Partial<Record<EntityType, string[]>>;
  date?: DateFilter;
  fulltext?: string;
  facets?: Partial<Record<FacetField, string>>;
  polygon?: [number, number][];
  page?: { from: number; size: number };
}

export interface SearchHit {
  doc_id: string;
  page_no: number;
  score: number;
  snippet: string;
}

export interface SearchResponse {
  total: number;
  hits: SearchHit[];
  facets: Record<FacetField, Record<string, number>>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
