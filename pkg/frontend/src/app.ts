// Application shell: cluster browser on the left, field review on the
// right, export button in the toolbar. All rendering goes through the pure
// builders in views.ts; this file only wires DOM events to the API client
// and the decision store.

import { ApiClient } from "./api.js";
import { downloadMapping, fetchMapping } from "./export.js";
import { DecisionStore } from "./state.js";
import type { ClusterListPayload, FieldAlignments } from "./types.js";
import {
  buildAlignmentRows,
  clusterPage,
  ClusterSortKey,
  renderAlignmentTable,
  renderClusterList,
} from "./views.js";

const api = new ApiClient("");
const store = new DecisionStore(api);

const state = {
  clusters: null as ClusterListPayload | null,
  sortBy: "id" as ClusterSortKey,
  page: 0,
  openCluster: null as number | null,
  openField: null as FieldAlignments | null,
};

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function toast(message: string): void {
  const box = element<HTMLDivElement>("toast");
  box.textContent = message;
  box.classList.add("visible");
  window.setTimeout(() => box.classList.remove("visible"), 4000);
}

async function refreshClusters(): Promise<void> {
  try {
    state.clusters = await api.listClusters();
    element<HTMLDivElement>("banner").classList.remove("visible");
  } catch {
    element<HTMLDivElement>("banner").classList.add("visible");
    return;
  }
  renderClusters();
}

function renderClusters(): void {
  if (!state.clusters) return;
  const page = clusterPage(state.clusters.clusters, state.sortBy, state.page);
  state.page = page.page;
  element<HTMLDivElement>("cluster-list").innerHTML = renderClusterList(page);
  for (const row of element<HTMLDivElement>("cluster-list").querySelectorAll("tr[data-cluster]")) {
    row.addEventListener("click", () => {
      void openCluster(Number((row as HTMLElement).dataset.cluster));
    });
  }
}

async function openCluster(id: number): Promise<void> {
  state.openCluster = id;
  const detail = await api.clusterDetail(id);
  const members = detail.members
    .map((member) => {
      const badge = member.decision
        ? member.decision.iri
          ? "accepted"
          : "rejected"
        : "pending";
      return `<li data-field="${member.index}">
<span class="badge badge-${badge}">${badge}</span>
${member.normalized} <span class="count">(${member.num_candidates})</span>
</li>`;
    })
    .join("\n");
  const rec = detail.recommendation
    ? `recommendation: <strong>${detail.recommendation.ontology_id}</strong> covering ${detail.recommendation.covered_count}`
    : "no ontology recommendation";
  element<HTMLDivElement>("cluster-detail").innerHTML =
    `<h2>cluster ${detail.id} (${detail.size} fields)</h2><p>${rec}</p><ul>${members}</ul>`;
  for (const item of element<HTMLDivElement>("cluster-detail").querySelectorAll("li[data-field]")) {
    item.addEventListener("click", () => {
      void openField(Number((item as HTMLElement).dataset.field));
    });
  }
}

async function openField(index: number): Promise<void> {
  const payload = await api.fieldAlignments(index);
  state.openField = payload;
  store.remember(index, payload.decision);
  renderField();
}

function renderField(): void {
  const payload = state.openField;
  if (!payload) return;
  const decision = store.known(payload.index) ?? payload.decision;
  const rows = buildAlignmentRows(payload, decision ?? null);
  const neighbors = payload.neighbors
    .map((n) => `<li>${n.normalized} <span class="count">(d=${n.distance.toFixed(3)})</span></li>`)
    .join("");
  element<HTMLDivElement>("field-review").innerHTML = `<h2>${payload.normalized}</h2>
${renderAlignmentTable(rows)}
<p><button id="reject-all">reject all</button></p>
${neighbors ? `<h3>nearest in-cluster neighbors</h3><ul class="neighbors">${neighbors}</ul>` : ""}`;
  for (const button of element<HTMLDivElement>("field-review").querySelectorAll("button.accept")) {
    button.addEventListener("click", () => {
      const el = button as HTMLButtonElement;
      void decide(payload.index, el.dataset.iri ?? null, el.dataset.ontology ?? null);
    });
  }
  element<HTMLButtonElement>("reject-all").addEventListener("click", () => {
    void decide(payload.index, null, null);
  });
}

async function decide(fieldIndex: number, iri: string | null, ontologyId: string | null): Promise<void> {
  renderField(); // optimistic state is set inside submit; render after return
  const outcome = await store.submit(fieldIndex, iri, ontologyId);
  if (outcome.conflict) {
    toast("The candidate list changed; refreshed this field.");
    await openField(fieldIndex); // 422: refetch the stale row
    return;
  }
  if (!outcome.ok) {
    toast("Saving the decision failed; state restored.");
  }
  renderField();
  if (state.openCluster !== null) {
    void openCluster(state.openCluster);
  }
  void refreshClusters();
}

function wireToolbar(): void {
  element<HTMLSelectElement>("sort-by").addEventListener("change", (event) => {
    state.sortBy = (event.target as HTMLSelectElement).value as ClusterSortKey;
    state.page = 0;
    renderClusters();
  });
  element<HTMLButtonElement>("prev-page").addEventListener("click", () => {
    state.page -= 1;
    renderClusters();
  });
  element<HTMLButtonElement>("next-page").addEventListener("click", () => {
    state.page += 1;
    renderClusters();
  });
  element<HTMLButtonElement>("export").addEventListener("click", () => {
    void (async () => {
      const mapping = await fetchMapping(api);
      downloadMapping(
        [mapping.header, ...mapping.rows].map((cols) => cols.join("\t")).join("\n") + "\n",
      );
      toast(`Exported ${mapping.rows.length} accepted mappings.`);
    })();
  });
  element<HTMLButtonElement>("retry").addEventListener("click", () => {
    void refreshClusters();
  });
}

document.addEventListener("DOMContentLoaded", () => {
  wireToolbar();
  void refreshClusters();
});
