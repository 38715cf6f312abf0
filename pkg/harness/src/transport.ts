/**
 * Chat-completions transport with bounded retry/backoff.
 *
 * The API key comes from an environment variable only (never a flag, never a
 * file) and the temperature is pinned to 0 so reruns are as deterministic as
 * the provider allows.
 */

export interface UnitKey {
  fund: string;
  period: string;
  sector?: string;
  questionId?: string;
}

export interface CompletionRequest {
  prompt: string;
  unit: UnitKey;
}

export interface Transport {
  complete(request: CompletionRequest): Promise<string>;
}

export class TransportError extends Error {
  constructor(message: string, readonly attempts: number) {
    super(message);
    this.name = "TransportError";
  }
}

export interface HttpTransportOptions {
  endpoint: string;
  model?: string;
  apiKeyVar?: string;
  maxAttempts?: number;
  baseDelayMs?: number;
  /** Injectable for tests; defaults to a real sleep. */
  sleep?: (ms: number) => Promise<void>;
  fetchImpl?: typeof fetch;
}

const RETRYABLE_STATUS = new Set([408, 429, 500, 502, 503, 504]);

export class HttpTransport implements Transport {
  private readonly endpoint: string;
  private readonly model: string;
  private readonly apiKeyVar: string;
  private readonly maxAttempts: number;
  private readonly baseDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private readonly fetchImpl: typeof fetch;

  constructor(options: HttpTransportOptions) {
    this.endpoint = options.endpoint.replace(/\/$/, "");
    this.model = options.model ?? "gpt-4";
    this.apiKeyVar = options.apiKeyVar ?? "OPENAI_API_KEY";
    this.maxAttempts = options.maxAttempts ?? 3;
    this.baseDelayMs = options.baseDelayMs ?? 500;
    this.sleep = options.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  async complete(request: CompletionRequest): Promise<string> {
    let lastError = "no attempt made";
    for (let attempt = 0; attempt < this.maxAttempts; attempt++) {
      if (attempt > 0) {
        await this.sleep(this.baseDelayMs * 2 ** (attempt - 1));
      }
      try {
        const response = await this.fetchImpl(`${this.endpoint}/chat/completions`, {
          method: "POST",
          headers: this.headers(),
          body: JSON.stringify({
            model: this.model,
            temperature: 0,
            messages: [{ role: "user", content: request.prompt }],
          }),
        });
        if (!response.ok) {
          lastError = `HTTP ${response.status}`;
          if (RETRYABLE_STATUS.has(response.status)) {
            continue;
          }
          throw new TransportError(`endpoint returned ${response.status}`, attempt + 1);
        }
        const payload = (await response.json()) as {
          choices?: { message?: { content?: string } }[];
        };
        const content = payload.choices?.[0]?.message?.content;
        if (typeof content !== "string") {
          throw new TransportError("response carried no message content", attempt + 1);
        }
        return content;
      } catch (error) {
        if (error instanceof TransportError) {
          throw error;
        }
        lastError = error instanceof Error ? error.message : String(error);
      }
    }
    throw new TransportError(
      `gave up after ${this.maxAttempts} attempts (${lastError})`,
      this.maxAttempts,
    );
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    const key = process.env[this.apiKeyVar];
    if (key) {
      headers["Authorization"] = `Bearer ${key}`;
    }
    return headers;
  }
}
