// Export helpers: fetch the accepted-mapping TSV and hand it to the
// browser as a download. Parsing is separate so row counts are testable.

import { ApiClient } from "./api.js";

export interface MappingTsv {
  header: string[];
  rows: string[][];
}

export function parseMappingTsv(text: string): MappingTsv {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const [head, ...rest] = lines;
  return {
    header: head.split("\t"),
    rows: rest.map((line) => line.split("\t")),
  };
}

export async function fetchMapping(api: ApiClient): Promise<MappingTsv> {
  return parseMappingTsv(await api.exportMapping());
}

export function downloadMapping(text: string, filename = "mapping.tsv"): void {
  const blob = new Blob([text], { type: "text/tab-separated-values" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}
