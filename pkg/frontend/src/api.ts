// Typed client for the portrait query service (/v1 endpoints).

export interface ChainSpan {
  start_orig: number;
  end_orig: number;
  start_norm: number;
  count: number;
  char_length: number;
  text: string;
}

export interface CheckResponse {
  portrait: string;
  ngram_width: number;
  doc_norm_length: number;
  chains: ChainSpan[];
  longest_chain: ChainSpan | null;
  overlap_ratio: number;
  expected_matches: number;
  is_member: boolean;
  flags: boolean[] | null;
  elapsed_ms: number;
}

export interface PortraitInfo {
  name: string;
  ngram_width: number;
  stride: number;
  m_bits: number;
  k_hashes: number;
  inserted: number;
  saturation: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // fall through to the status line
  }
  return `request failed with status ${response.status}`;
}

export class PortraitClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async check(document: string, portrait?: string): Promise<CheckResponse> {
    const body: Record<string, unknown> = { document };
    if (portrait !== undefined) body.portrait = portrait;
    const response = await this.fetchImpl(`${this.baseUrl}/v1/check`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as CheckResponse;
  }

  async portraits(): Promise<PortraitInfo[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/v1/portraits`);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as PortraitInfo[];
  }
}
