// Pure view-model builders. Rendering rules that matter to correctness
// live here, DOM-free, so they are directly testable:
//   - candidate rows keep the API payload order exactly (rank fidelity),
//   - every similarity number is shown with three decimals, formatted from
//     the payload value without re-deriving anything.

import type {
  Candidate,
  ClusterSummary,
  Decision,
  DecisionState,
  FieldAlignments,
} from "./types.js";

export interface AlignmentRow {
  rank: number;
  label: string;
  ontologyId: string;
  iri: string;
  coSim: string;
  editSim: string;
  combined: string;
  state: DecisionState;
}

export function formatScore(value: number): string {
  return value.toFixed(3);
}

function stateOf(candidate: Candidate, decision: Decision | null): DecisionState {
  if (decision === null) return "pending";
  if (decision.iri === null) return "rejected";
  return decision.iri === candidate.iri && decision.ontology_id === candidate.ontology_id
    ? "accepted"
    : "pending";
}

export function buildAlignmentRows(
  payload: FieldAlignments,
  decision: Decision | null = payload.decision,
): AlignmentRow[] {
  return payload.candidates.map((candidate, position) => ({
    rank: position + 1,
    label: candidate.label,
    ontologyId: candidate.ontology_id,
    iri: candidate.iri,
    coSim: formatScore(candidate.co_sim),
    editSim: formatScore(candidate.edit_sim),
    combined: formatScore(candidate.combined),
    state: stateOf(candidate, decision),
  }));
}

export type ClusterSortKey = "id" | "size" | "coverage";

export interface ClusterPage {
  rows: ClusterSummary[];
  page: number;
  pageCount: number;
}

export function clusterPage(
  clusters: ClusterSummary[],
  sortBy: ClusterSortKey,
  page: number,
  pageSize: number = 25,
): ClusterPage {
  const rows = [...clusters];
  if (sortBy === "size") {
    rows.sort((a, b) => b.size - a.size || a.id - b.id);
  } else if (sortBy === "coverage") {
    const covered = (c: ClusterSummary) => c.recommendation?.covered_count ?? 0;
    rows.sort((a, b) => covered(b) - covered(a) || a.id - b.id);
  }
  const pageCount = Math.max(1, Math.ceil(rows.length / pageSize));
  const current = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    rows: rows.slice(current * pageSize, (current + 1) * pageSize),
    page: current,
    pageCount,
  };
}

// Minimal HTML renderers used by the app shell; kept as string builders so
// ordering and formatting are assertable without a DOM.

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderAlignmentTable(rows: AlignmentRow[]): string {
  if (rows.length === 0) {
    return '<p class="empty">No suggestions above the threshold for this field.</p>';
  }
  const body = rows
    .map(
      (row) => `<tr class="row-${row.state}" data-iri="${escapeHtml(row.iri)}" data-ontology="${escapeHtml(row.ontologyId)}">
<td>${row.rank}</td>
<td>${escapeHtml(row.label)}</td>
<td>${escapeHtml(row.ontologyId)}</td>
<td class="num">${row.coSim}</td>
<td class="num">${row.editSim}</td>
<td class="num">${row.combined}</td>
<td>${row.state}</td>
<td><button class="accept" data-iri="${escapeHtml(row.iri)}" data-ontology="${escapeHtml(row.ontologyId)}">accept</button></td>
</tr>`,
    )
    .join("\n");
  return `<table class="alignments">
<thead><tr><th>#</th><th>term</th><th>ontology</th><th>co-sim</th><th>edit-sim</th><th>combined</th><th>state</th><th></th></tr></thead>
<tbody>
${body}
</tbody>
</table>`;
}

export function renderClusterList(page: ClusterPage): string {
  const body = page.rows
    .map((cluster) => {
      const rec = cluster.recommendation
        ? `${escapeHtml(cluster.recommendation.ontology_id)} (${cluster.recommendation.covered_count})`
        : "-";
      return `<tr data-cluster="${cluster.id}">
<td>${cluster.id}</td><td>${cluster.size}</td><td>${rec}</td><td>${cluster.decided}/${cluster.size}</td>
</tr>`;
    })
    .join("\n");
  return `<table class="clusters">
<thead><tr><th>id</th><th>size</th><th>recommendation</th><th>decided</th></tr></thead>
<tbody>
${body}
</tbody>
</table>
<p class="pager">page ${page.page + 1} of ${page.pageCount}</p>`;
}
