/** DOM wiring: canvas, config panel, polling loop. */

import { HttpApi } from './api.js';
import { PlannerController, ViewState } from './controller.js';
import {
  canvasToMap,
  drawMarkers,
  hitTestMarker,
  renderDiff,
  renderMap,
} from './render.js';
import { colorize } from './colorize.js';

const API_BASE = (window as { UDNSIM_API?: string }).UDNSIM_API
  ?? 'http://127.0.0.1:8765';
const CANVAS_PX = 600;
const POLL_MS = 500;

const api = new HttpApi(API_BASE);
const controller = new PlannerController(api);

const canvas = document.getElementById('map') as HTMLCanvasElement;
const status = document.getElementById('status') as HTMLElement;
const errors = document.getElementById('errors') as HTMLElement;
const form = document.getElementById('config-form') as HTMLFormElement;
const diffToggle = document.getElementById('diff-mode') as HTMLInputElement;
const legend = document.getElementById('legend') as HTMLCanvasElement;

canvas.width = canvas.height = CANVAS_PX;

function drawLegend(): void {
  legend.width = 256;
  legend.height = 14;
  const g = legend.getContext('2d')!;
  const img = g.createImageData(256, 14);
  for (let x = 0; x < 256; x++) {
    const c = colorize(x / 255);
    for (let y = 0; y < 14; y++) {
      const o = (y * 256 + x) * 4;
      img.data[o] = c.r;
      img.data[o + 1] = c.g;
      img.data[o + 2] = c.b;
      img.data[o + 3] = 255;
    }
  }
  g.putImageData(img, 0, 0);
}

function redraw(state: ViewState): void {
  const g = canvas.getContext('2d')!;
  const side = state.scenario
    ? (state.scenario.config.side_km as number) : 1.5;
  if (diffToggle.checked && state.diff) {
    const frame = renderDiff(state.diff, CANVAS_PX);
    g.putImageData(new ImageData(frame.data, frame.width, frame.height), 0, 0);
  } else if (state.map) {
    const frame = renderMap(state.map, CANVAS_PX);
    if (state.scenario) drawMarkers(frame, state.scenario.bs, side);
    g.putImageData(new ImageData(frame.data, frame.width, frame.height), 0, 0);
  } else {
    g.fillStyle = '#ddd';
    g.fillRect(0, 0, CANVAS_PX, CANVAS_PX);
    g.fillStyle = '#333';
    g.fillText('no result yet — press Compute', 220, CANVAS_PX / 2);
  }
  const bits = [];
  if (state.scenario) {
    bits.push(`scenario ${state.scenario.id} rev ${state.scenario.revision}`,
              `${state.scenario.bs.length} BSs`);
  }
  bits.push(state.busy
    ? `computing… ${(state.progress * 100).toFixed(0)}%`
    : `idle (${state.mapPhase})`);
  if (state.stale) bits.push('LAYER STALE');
  status.textContent = bits.join(' · ');
  errors.textContent = state.lastError;
}

controller.onChange = redraw;

canvas.addEventListener('click', (ev) => {
  const st = controller.state;
  if (!st.scenario) return;
  const rect = canvas.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) / rect.width) * CANVAS_PX;
  const py = ((ev.clientY - rect.top) / rect.height) * CANVAS_PX;
  const side = st.scenario.config.side_km as number;
  const hit = hitTestMarker(px, py, st.scenario.bs, CANVAS_PX, side);
  if (hit >= 0) {
    void controller.deleteBs(hit);
  } else {
    const { xKm, yKm } = canvasToMap(px, py, CANVAS_PX, side);
    void controller.addBs(xKm, yKm);
  }
});

function formConfig(): Record<string, unknown> {
  const data = new FormData(form);
  const num = (k: string) => Number(data.get(k));
  return {
    side_km: num('side_km'),
    lambda_bs_per_km2: num('lambda'),
    rho_ue_per_km2: num('rho'),
    bs_height_m: num('delta_h') + 1.5,
    ue_height_m: 1.5,
    channel_model: String(data.get('channel')),
    imc_enabled: data.get('imc') === 'on',
    full_load: data.get('full_load') === 'on',
    scheduler: String(data.get('scheduler')),
    duplex: String(data.get('duplex')),
    ic_depth: num('ic_depth'),
    ul_power_mode: String(data.get('ul_power')),
    master_seed: num('seed'),
  };
}

form.addEventListener('submit', (ev) => {
  ev.preventDefault();
  void (async () => {
    try {
      // configs are immutable server-side: a settings change is a new
      // scenario, and the previous fine map becomes the diff baseline
      const previousFine = controller.latestFineJob;
      const id = await api.createScenario(formConfig());
      await controller.load(id);
      if (previousFine) await controller.setBaseline(previousFine);
      const direction = String(new FormData(form).get('direction') ?? 'dl');
      controller.opts.direction = direction;
      await controller.scheduleRecompute();
    } catch (err) {
      errors.textContent = err instanceof Error ? err.message : String(err);
    }
  })();
});

diffToggle.addEventListener('change', () => redraw(controller.state));

drawLegend();
redraw(controller.state);
window.setInterval(() => void controller.tick(), POLL_MS);
