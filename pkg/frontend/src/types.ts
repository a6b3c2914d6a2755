// Payload shapes of the curation API. These mirror the server's JSON
// exactly; the UI never reshapes or reorders what it receives.

export interface Candidate {
  iri: string;
  label: string;
  ontology_id: string;
  co_sim: number;
  edit_sim: number;
  combined: number;
}

export interface Neighbor {
  index: number;
  normalized: string;
  distance: number;
  top_candidates?: string[];
}

export interface Decision {
  field_index: number;
  iri: string | null;
  ontology_id: string | null;
  note: string | null;
  decided_at: number;
}

export interface FieldAlignments {
  index: number;
  normalized: string;
  candidates: Candidate[];
  neighbors: Neighbor[];
  decision: Decision | null;
}

export interface Recommendation {
  cluster_id: number;
  ontology_id: string;
  covered_count: number;
  covered_fields: number[];
}

export interface ClusterSummary {
  id: number;
  size: number;
  recommendation: Recommendation | null;
  decided: number;
}

export interface ClusterListPayload {
  clusters: ClusterSummary[];
  noise: number[];
  stats: Record<string, number> | null;
}

export interface ClusterMember {
  index: number;
  normalized: string;
  num_candidates: number;
  decision: Decision | null;
}

export interface ClusterDetail {
  id: number;
  size: number;
  recommendation: Recommendation | null;
  members: ClusterMember[];
}

export interface DecisionRequest {
  field_index: number;
  iri?: string | null;
  ontology_id?: string | null;
  note?: string | null;
}

export type DecisionState = "pending" | "accepted" | "rejected";
