/**
 * Operator-loop state machine: scenario edits trigger a coarse preview
 * compute followed by a fine pass; results render only if they belong to
 * the scenario's current revision, and superseded jobs are cancelled.
 * Polling is driven externally (call tick() on a timer) so tests can pump
 * it manually.
 */

import { Api, CoverageMapJson, DiffMapJson, ScenarioRecord } from './api.js';

export interface ControllerOptions {
  direction: string;
  coarseResolution: number;
  coarseTrials: number;
  fineResolution: number;
  fineTrials: number;
}

export const DEFAULT_OPTIONS: ControllerOptions = {
  direction: 'dl',
  coarseResolution: 20,
  coarseTrials: 500,
  fineResolution: 60,
  fineTrials: 2000,
};

interface PendingJob {
  jobId: string;
  revision: number;
  phase: 'coarse' | 'fine';
}

export interface ViewState {
  scenario: ScenarioRecord | null;
  map: CoverageMapJson | null;
  mapRevision: number;      // revision the displayed map was computed from
  mapPhase: 'none' | 'coarse' | 'fine';
  stale: boolean;           // displayed layer older than the scenario
  busy: boolean;
  progress: number;
  diffBaselineJob: string | null;
  diff: DiffMapJson | null;
  lastError: string;
}

export class PlannerController {
  readonly opts: ControllerOptions;
  private api: Api;
  private pending: PendingJob[] = [];
  private lastFineJob: string | null = null;
  state: ViewState = {
    scenario: null,
    map: null,
    mapRevision: -1,
    mapPhase: 'none',
    stale: false,
    busy: false,
    progress: 0,
    diffBaselineJob: null,
    diff: null,
    lastError: '',
  };
  onChange: (s: ViewState) => void = () => undefined;

  constructor(api: Api, opts: Partial<ControllerOptions> = {}) {
    this.api = api;
    this.opts = { ...DEFAULT_OPTIONS, ...opts };
  }

  private emit(): void {
    this.onChange(this.state);
  }

  async load(scenarioId: string): Promise<void> {
    this.state.scenario = await this.api.getScenario(scenarioId);
    this.state.stale = this.state.mapRevision !== this.state.scenario.revision;
    this.emit();
  }

  get revision(): number {
    return this.state.scenario ? this.state.scenario.revision : -1;
  }

  /** Click on empty space adds a BS; markers are deleted by index. */
  async addBs(xKm: number, yKm: number): Promise<void> {
    if (!this.state.scenario) return;
    try {
      await this.api.addBs(this.state.scenario.id, xKm, yKm);
      await this.load(this.state.scenario.id);
      await this.scheduleRecompute();
    } catch (err) {
      this.fail(err);
    }
  }

  async deleteBs(index: number): Promise<void> {
    if (!this.state.scenario) return;
    try {
      await this.api.deleteBs(this.state.scenario.id, index);
      await this.load(this.state.scenario.id);
      await this.scheduleRecompute();
    } catch (err) {
      this.fail(err);
    }
  }

  /**
   * Submit coarse + fine computations for the current revision, cancelling
   * whatever older-revision work is still pending.
   */
  async scheduleRecompute(): Promise<void> {
    if (!this.state.scenario) return;
    const revision = this.state.scenario.revision;
    const dead = this.pending.filter((p) => p.revision !== revision);
    this.pending = this.pending.filter((p) => p.revision === revision);
    for (const p of dead) {
      try {
        await this.api.cancelJob(p.jobId);
      } catch {
        /* already finished */
      }
    }
    if (this.pending.length > 0) return; // current revision already queued
    try {
      const sid = this.state.scenario.id;
      const coarse = await this.api.compute(sid, {
        direction: this.opts.direction,
        resolution: this.opts.coarseResolution,
        trials: this.opts.coarseTrials,
      });
      this.pending.push({ jobId: coarse, revision, phase: 'coarse' });
      const fine = await this.api.compute(sid, {
        direction: this.opts.direction,
        resolution: this.opts.fineResolution,
        trials: this.opts.fineTrials,
      });
      this.pending.push({ jobId: fine, revision, phase: 'fine' });
      this.state.busy = true;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  /** One poll step: advance pending jobs, render whatever finished. */
  async tick(): Promise<void> {
    if (this.pending.length === 0) return;
    const still: PendingJob[] = [];
    for (const p of this.pending) {
      let status;
      try {
        status = await this.api.jobStatus(p.jobId);
      } catch (err) {
        this.fail(err);
        continue;
      }
      if (status.status === 'queued' || status.status === 'running') {
        if (p.phase === 'fine') this.state.progress = status.progress;
        still.push(p);
        continue;
      }
      if (status.status !== 'done') {
        if (status.status === 'failed') this.fail(new Error(status.error));
        continue; // cancelled/failed jobs just drop out
      }
      if (p.revision !== this.revision) continue; // stale result, ignore
      // never let a coarse layer overwrite a fine one of the same revision
      if (p.phase === 'coarse' && this.state.mapPhase === 'fine'
          && this.state.mapRevision === p.revision) continue;
      try {
        this.state.map = await this.api.jobResult(p.jobId);
        this.state.mapRevision = p.revision;
        this.state.mapPhase = p.phase;
        this.state.stale = p.revision !== this.revision;
        if (p.phase === 'fine') {
          this.lastFineJob = p.jobId;
          await this.refreshDiff();
        }
        this.emit();
      } catch (err) {
        this.fail(err);
      }
    }
    this.pending = still;
    this.state.busy = this.pending.length > 0;
    this.emit();
  }

  /** Pin the latest fine map as the diff baseline (or clear with null). */
  async setBaseline(jobId: string | null): Promise<void> {
    this.state.diffBaselineJob = jobId;
    this.state.diff = null;
    await this.refreshDiff();
    this.emit();
  }

  get latestFineJob(): string | null {
    return this.lastFineJob;
  }

  private async refreshDiff(): Promise<void> {
    const base = this.state.diffBaselineJob;
    if (!base || !this.lastFineJob || base === this.lastFineJob) {
      this.state.diff = null;
      return;
    }
    try {
      this.state.diff = await this.api.diff(this.lastFineJob, base);
    } catch (err) {
      this.fail(err);
    }
  }

  private fail(err: unknown): void {
    this.state.lastError = err instanceof Error ? err.message : String(err);
    this.emit();
  }
}
