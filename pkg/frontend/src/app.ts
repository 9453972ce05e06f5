/**
 * DOM wiring for the query form and results pane.
 *
 * All logic lives in the imported modules; this file only reads the form
 * into a QueryFormState, calls buildQuery, sends the request and renders the
 * view models.  A monotonically increasing request id drops stale responses
 * so only the newest submission ever reaches the screen.
 */

import { ApiError, SearchApiClient } from "./apiClient.js";
import {
  activeFilterSummary,
  buildQuery,
  DEFAULT_PAGE_SIZE,
  emptyForm,
  QueryFormState,
  setFacet,
} from "./queryBuilder.js";
import { ENTITY_LABELS, ENTITY_TYPES, FacetField, SearchResponse } from "./types.js";
import { resultsView } from "./viewModel.js";

const MATERIAL_TOOLTIP =
  "Materials are not searchable: material and artefact terms are too easy to confuse in queries.";

declare global {
  interface Window {
    GREYLIT_API_BASE?: string;
  }
}

export function mountApp(root: HTMLElement, baseUrl?: string): void {
  const client = new SearchApiClient(baseUrl ?? window.GREYLIT_API_BASE ?? "");
  let form = emptyForm();
  let requestCounter = 0;

  root.innerHTML = `
    <form id="query-form">
      <fieldset id="entity-fields"><legend>Entities</legend></fieldset>
      <fieldset>
        <legend>Date range</legend>
        <label>Start year <input name="startYear" placeholder="-2000"></label>
        <label>End year <input name="endYear" placeholder="-800"></label>
        <label>Mode
          <select name="dateMode">
            <option value="contain" selected>contain</option>
            <option value="overlap">overlap</option>
          </select>
        </label>
      </fieldset>
      <fieldset>
        <legend>Full text</legend>
        <input name="fulltext" placeholder="upside down">
      </fieldset>
      <fieldset>
        <legend>Bounding box</legend>
        <label>West <input name="bbox.west"></label>
        <label>South <input name="bbox.south"></label>
        <label>East <input name="bbox.east"></label>
        <label>North <input name="bbox.north"></label>
      </fieldset>
      <fieldset>
        <legend>Page</legend>
        <label>From <input name="pageFrom" value="0"></label>
        <label>Size <input name="pageSize" value="${DEFAULT_PAGE_SIZE}"></label>
      </fieldset>
      <button type="submit">Search</button>
    </form>
    <div id="error-banner" hidden></div>
    <div id="layout">
      <aside id="facets"></aside>
      <main id="results"></main>
    </div>
  `;

  const entityFields = root.querySelector("#entity-fields") as HTMLElement;
  for (const etype of ENTITY_TYPES) {
    const label = document.createElement("label");
    label.textContent = ENTITY_LABELS[etype] + " ";
    const input = document.createElement("input");
    input.name = `entity.${etype}`;
    if (etype === "MAT") {
      input.disabled = true;
      label.title = MATERIAL_TOOLTIP;
      label.append(" (not searchable)");
    }
    label.appendChild(input);
    entityFields.appendChild(label);
  }

  const formEl = root.querySelector("#query-form") as HTMLFormElement;
  const banner = root.querySelector("#error-banner") as HTMLElement;
  const resultsEl = root.querySelector("#results") as HTMLElement;
  const facetsEl = root.querySelector("#facets") as HTMLElement;

  function readForm(): QueryFormState {
    const value = (name: string) =>
      (formEl.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLSelectElement).value;
    const next = emptyForm();
    for (const etype of ENTITY_TYPES) next.entities[etype] = value(`entity.${etype}`);
    next.startYear = value("startYear");
    next.endYear = value("endYear");
    next.dateMode = value("dateMode") === "overlap" ? "overlap" : "contain";
    next.fulltext = value("fulltext");
    next.bbox = {
      west: value("bbox.west"),
      south: value("bbox.south"),
      east: value("bbox.east"),
      north: value("bbox.north"),
    };
    next.pageFrom = parseInt(value("pageFrom"), 10) || 0;
    next.pageSize = parseInt(value("pageSize"), 10) || DEFAULT_PAGE_SIZE;
    next.docType = form.docType;
    next.subject = form.subject;
    return next;
  }

  function showFieldErrors(errors: Record<string, string | undefined>): void {
    formEl.querySelectorAll(".field-error").forEach((el) => el.remove());
    for (const [field, message] of Object.entries(errors)) {
      const name = field.startsWith("bbox") || field.endsWith("Year") ? field : `entity.${field}`;
      const input = formEl.querySelector(`[name="${name}"]`);
      if (input && message) {
        const note = document.createElement("span");
        note.className = "field-error";
        note.textContent = message;
        input.insertAdjacentElement("afterend", note);
      }
    }
  }

  async function submit(): Promise<void> {
    form = readForm();
    const built = buildQuery(form);
    showFieldErrors({});
    if (!built.ok) {
      showFieldErrors(built.errors as Record<string, string>);
      return; // invalid form: no request leaves the page
    }
    const requestId = ++requestCounter;
    try {
      const response = await client.search(built.query);
      if (requestId !== requestCounter) return; // a newer search superseded this one
      banner.hidden = true;
      render(response);
    } catch (err) {
      if (requestId !== requestCounter) return;
      banner.hidden = false;
      banner.textContent =
        err instanceof ApiError ? `search failed (${err.code}): ${err.message}` : String(err);
    }
  }

  function render(response: SearchResponse): void {
    const view = resultsView(response, { doc_type: form.docType, subject: form.subject });
    resultsEl.innerHTML = "";
    if (view.noResults) {
      const empty = document.createElement("p");
      const filters = activeFilterSummary(form);
      empty.textContent = filters.length
        ? `No results for: ${filters.join(" AND ")}`
        : "No results.";
      resultsEl.appendChild(empty);
    } else {
      const summary = document.createElement("p");
      summary.textContent = `${view.total} page(s) found`;
      resultsEl.appendChild(summary);
      for (const hit of view.hits) {
        const item = document.createElement("article");
        const head = document.createElement("h3");
        head.textContent = `${hit.docId} — page ${hit.pageNo} (score ${hit.score.toFixed(3)})`;
        const body = document.createElement("p");
        for (const part of hit.snippetParts) {
          if (part.highlight) {
            const em = document.createElement("em");
            em.textContent = part.text;
            body.appendChild(em);
          } else {
            body.appendChild(document.createTextNode(part.text));
          }
        }
        item.append(head, body);
        resultsEl.appendChild(item);
      }
    }

    facetsEl.innerHTML = "";
    for (const group of view.facets) {
      const box = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = group.label;
      box.appendChild(legend);
      for (const entry of group.values) {
        const label = document.createElement("label");
        const check = document.createElement("input");
        check.type = "checkbox";
        check.checked = entry.active;
        check.addEventListener("change", () => {
          form = setFacet(form, group.field as FacetField, check.checked ? entry.value : null);
          void submit();
        });
        label.append(check, ` ${entry.value} (${entry.count})`);
        box.appendChild(label);
      }
      facetsEl.appendChild(box);
    }
  }

  formEl.addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });
  void submit(); // initial match-all search fills the facet sidebar
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  mountApp(rootElement);
}
