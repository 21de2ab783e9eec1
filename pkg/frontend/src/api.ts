/** Thin typed client for the planning service HTTP API. */

export interface CoverageMapJson {
  fingerprint?: string;
  resolution: number;
  side_km: number;
  direction: string;
  values: number[]; // row-major: index = i * resolution + j
}

export interface DiffMapJson {
  resolution: number;
  side_km: number;
  values: number[];
}

export interface ScenarioRecord {
  id: string;
  config: Record<string, unknown>;
  bs: [number, number][];
  revision: number;
}

export interface JobStatus {
  id: string;
  scenario_id: string;
  revision: number;
  direction: string;
  status: 'queued' | 'running' | 'done' | 'failed' | 'cancelled';
  progress: number;
  error: string;
}

export interface ComputeOverrides {
  direction: string;
  resolution?: number;
  trials?: number;
}

export interface Api {
  createScenario(config: Record<string, unknown>): Promise<string>;
  getScenario(id: string): Promise<ScenarioRecord>;
  addBs(id: string, xKm: number, yKm: number): Promise<void>;
  deleteBs(id: string, index: number): Promise<void>;
  compute(id: string, overrides: ComputeOverrides): Promise<string>;
  jobStatus(jobId: string): Promise<JobStatus>;
  jobResult(jobId: string): Promise<CoverageMapJson>;
  cancelJob(jobId: string): Promise<void>;
  diff(a: string, b: string): Promise<DiffMapJson>;
}

async function check(res: Response): Promise<Response> {
  if (!res.ok) {
    let message = `${res.status}`;
    try {
      const body = await res.json();
      if (body && body.error) message = `${res.status}: ${body.error}`;
    } catch {
      /* non-JSON error body */
    }
    throw new Error(message);
  }
  return res;
}

export class HttpApi implements Api {
  constructor(private base: string) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await check(await fetch(this.base + path, init));
    return (await res.json()) as T;
  }

  private post(body: unknown): RequestInit {
    return {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    };
  }

  async createScenario(config: Record<string, unknown>): Promise<string> {
    const out = await this.json<{ id: string }>('/scenarios', this.post(config));
    return out.id;
  }

  getScenario(id: string): Promise<ScenarioRecord> {
    return this.json(`/scenarios/${id}`);
  }

  async addBs(id: string, xKm: number, yKm: number): Promise<void> {
    await this.json(`/scenarios/${id}/bs`, this.post({ x_km: xKm, y_km: yKm }));
  }

  async deleteBs(id: string, index: number): Promise<void> {
    await this.json(`/scenarios/${id}/bs/${index}`, { method: 'DELETE' });
  }

  async compute(id: string, overrides: ComputeOverrides): Promise<string> {
    const out = await this.json<{ job_id: string }>(
      `/scenarios/${id}/compute`, this.post(overrides));
    return out.job_id;
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.json(`/jobs/${jobId}`);
  }

  jobResult(jobId: string): Promise<CoverageMapJson> {
    return this.json(`/jobs/${jobId}/result`);
  }

  async cancelJob(jobId: string): Promise<void> {
    await this.json(`/jobs/${jobId}`, { method: 'DELETE' });
  }

  diff(a: string, b: string): Promise<DiffMapJson> {
    return this.json(`/diff?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`);
  }
}
