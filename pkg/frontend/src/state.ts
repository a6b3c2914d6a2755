// Decision state with optimistic updates. Accepting or rejecting flips the
// local state immediately; a 4xx/5xx response rolls it back and reports the
// conflict so the caller can refetch the row.

import { ApiClient, ApiError } from "./api.js";
import type { Decision } from "./types.js";

export interface SubmitOutcome {
  ok: boolean;
  conflict: boolean; // a 422: the candidate list is stale, refetch it
  decision: Decision | null;
}

export class DecisionStore {
  private decisions = new Map<number, Decision | null>();

  constructor(private readonly api: ApiClient) {}

  known(fieldIndex: number): Decision | null | undefined {
    return this.decisions.get(fieldIndex);
  }

  remember(fieldIndex: number, decision: Decision | null): void {
    this.decisions.set(fieldIndex, decision);
  }

  /** Accept a term (iri + ontology) or reject all (both null). */
  async submit(
    fieldIndex: number,
    iri: string | null,
    ontologyId: string | null,
    note: string | null = null,
  ): Promise<SubmitOutcome> {
    const previous = this.decisions.get(fieldIndex) ?? null;
    const optimistic: Decision = {
      field_index: fieldIndex,
      iri,
      ontology_id: ontologyId,
      note,
      decided_at: Date.now() / 1000,
    };
    this.decisions.set(fieldIndex, optimistic);
    try {
      const confirmed = await this.api.postDecision({
        field_index: fieldIndex,
        iri,
        ontology_id: ontologyId,
        note,
      });
      this.decisions.set(fieldIndex, confirmed);
      return { ok: true, conflict: false, decision: confirmed };
    } catch (error) {
      this.decisions.set(fieldIndex, previous); // roll the optimism back
      const conflict = error instanceof ApiError && error.status === 422;
      if (error instanceof ApiError) {
        return { ok: false, conflict, decision: previous };
      }
      throw error;
    }
  }
}
