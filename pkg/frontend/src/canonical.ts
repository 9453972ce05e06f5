/**
 * Canonical JSON: object keys sorted recursively, no whitespace.
 * Byte-compatible with Python's json.dumps(obj, sort_keys=True,
 * separators=(",", ":")) for the value types the query body uses.
 */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .filter(([, v]) => v !== undefined)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
  const body = entries.map(([k, v]) => JSON.stringify(k) + ":" + canonicalJson(v));
  return "{" + body.join(",") + "}";
}
