import { beforeEach, describe, expect, it } from 'vitest';
import {
  Api,
  ComputeOverrides,
  CoverageMapJson,
  DiffMapJson,
  JobStatus,
  ScenarioRecord,
} from '../src/api.js';
import { PlannerController } from '../src/controller.js';

/** In-memory fake of the planning service. */
class FakeApi implements Api {
  scenario: ScenarioRecord = {
    id: 's1',
    config: { side_km: 1.5, resolution: 4, trials: 10 },
    bs: [[0.2, 0.2]],
    revision: 0,
  };
  jobs = new Map<string, { status: JobStatus; result: CoverageMapJson }>();
  cancelled: string[] = [];
  computeCalls: ComputeOverrides[] = [];
  private seq = 0;

  async createScenario(): Promise<string> {
    return this.scenario.id;
  }

  async getScenario(): Promise<ScenarioRecord> {
    return JSON.parse(JSON.stringify(this.scenario));
  }

  async addBs(_id: string, x: number, y: number): Promise<void> {
    this.scenario.bs.push([x, y]);
    this.scenario.revision += 1;
  }

  async deleteBs(_id: string, index: number): Promise<void> {
    this.scenario.bs.splice(index, 1);
    this.scenario.revision += 1;
  }

  async compute(_id: string, overrides: ComputeOverrides): Promise<string> {
    this.computeCalls.push(overrides);
    const id = `job${this.seq++}`;
    const res = overrides.resolution ?? 4;
    const fill = this.scenario.revision / 10; // revisions give distinct maps
    this.jobs.set(id, {
      status: {
        id, scenario_id: 's1', revision: this.scenario.revision,
        direction: overrides.direction, status: 'queued', progress: 0, error: '',
      },
      result: {
        resolution: res, side_km: 1.5, direction: overrides.direction,
        values: new Array(res * res).fill(fill),
      },
    });
    return id;
  }

  finish(jobId: string): void {
    const j = this.jobs.get(jobId)!;
    j.status.status = 'done';
    j.status.progress = 1;
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    return { ...this.jobs.get(jobId)!.status };
  }

  async jobResult(jobId: string): Promise<CoverageMapJson> {
    const j = this.jobs.get(jobId)!;
    if (j.status.status !== 'done') throw new Error('409: not done');
    return j.result;
  }

  async cancelJob(jobId: string): Promise<void> {
    this.cancelled.push(jobId);
    const j = this.jobs.get(jobId);
    if (j && j.status.status !== 'done') j.status.status = 'cancelled';
  }

  async diff(a: string, b: string): Promise<DiffMapJson> {
    const ma = this.jobs.get(a)!.result;
    const mb = this.jobs.get(b)!.result;
    return {
      resolution: ma.resolution,
      side_km: ma.side_km,
      values: ma.values.map((v, k) => v - mb.values[k]),
    };
  }
}

describe('operator loop', () => {
  let api: FakeApi;
  let ctl: PlannerController;

  beforeEach(async () => {
    api = new FakeApi();
    ctl = new PlannerController(api, {
      coarseResolution: 4, coarseTrials: 10,
      fineResolution: 8, fineTrials: 50,
    });
    await ctl.load('s1');
  });

  it('adding a BS triggers a coarse compute and renders the layer', async () => {
    await ctl.addBs(0.5, 0.5);
    expect(api.scenario.bs.length).toBe(2);
    expect(api.computeCalls.length).toBe(2); // coarse + fine queued
    expect(api.computeCalls[0].resolution).toBe(4);
    expect(api.computeCalls[1].resolution).toBe(8);
    api.finish('job0'); // the coarse one
    await ctl.tick();
    expect(ctl.state.map).not.toBeNull();
    expect(ctl.state.mapPhase).toBe('coarse');
    expect(ctl.state.mapRevision).toBe(1);
    expect(ctl.state.busy).toBe(true); // fine still pending
  });

  it('fine result replaces the coarse layer and clears busy', async () => {
    await ctl.addBs(0.5, 0.5);
    api.finish('job0');
    await ctl.tick();
    api.finish('job1');
    await ctl.tick();
    expect(ctl.state.mapPhase).toBe('fine');
    expect(ctl.state.map!.resolution).toBe(8);
    expect(ctl.state.busy).toBe(false);
    expect(ctl.state.stale).toBe(false);
  });

  it('a late coarse result never overwrites the fine layer', async () => {
    await ctl.addBs(0.5, 0.5);
    api.finish('job1'); // fine lands first
    await ctl.tick();
    expect(ctl.state.mapPhase).toBe('fine');
    api.finish('job0'); // now the coarse one arrives
    await ctl.tick();
    expect(ctl.state.mapPhase).toBe('fine');
  });

  it('rapid edits supersede older jobs: cancel + ignore stale results', async () => {
    await ctl.addBs(0.5, 0.5);      // revision 1, jobs 0/1
    await ctl.addBs(0.9, 0.9);      // revision 2 cancels and resubmits (jobs 2/3)
    expect(api.cancelled).toEqual(['job0', 'job1']);
    api.finish('job1');             // stale fine result anyway
    await ctl.tick();
    expect(ctl.state.map).toBeNull(); // ignored: belongs to revision 1
    api.finish('job2');
    api.finish('job3');
    await ctl.tick();
    expect(ctl.state.mapRevision).toBe(2);
    expect(ctl.state.mapPhase).toBe('fine');
  });

  it('deleting a marker recomputes too', async () => {
    await ctl.deleteBs(0);
    expect(api.scenario.bs.length).toBe(0);
    expect(api.computeCalls.length).toBe(2);
  });

  it('diff mode is antisymmetric when baseline and current are swapped', async () => {
    await ctl.addBs(0.5, 0.5);
    api.finish('job0');
    api.finish('job1');
    await ctl.tick();
    const first = ctl.latestFineJob!;
    await ctl.addBs(0.1, 0.9);
    api.finish('job2');
    api.finish('job3');
    await ctl.tick();
    const second = ctl.latestFineJob!;
    const forward = await api.diff(second, first);
    const backward = await api.diff(first, second);
    forward.values.forEach((v, k) => expect(backward.values[k]).toBeCloseTo(-v, 12));
    await ctl.setBaseline(first);
    expect(ctl.state.diff).not.toBeNull();
    ctl.state.diff!.values.forEach((v, k) =>
      expect(v).toBeCloseTo(forward.values[k], 12));
  });

  it('failed jobs surface an error message', async () => {
    await ctl.addBs(0.5, 0.5);
    const j = api.jobs.get('job0')!;
    j.status.status = 'failed';
    j.status.error = 'boom';
    await ctl.tick();
    expect(ctl.state.lastError).toContain('boom');
  });
});
