import { fetchModelInfo, requestPrediction } from './api.js';
import { cssColor, colorFor } from './colormap.js';
import { debounce } from './debounce.js';
import { drawSlice, surfaceCurvePoints } from './heatmap.js';
import {
  applyFailure,
  applyModelInfo,
  applyResponse,
  initialState,
  issueRequest,
  outletMeanDisplay,
  setSliders,
  sliceDisplays,
  uniformityIndicator,
} from './state.js';
import type { PredictResponse } from './types.js';

let state = initialState();
let nStations = 0;

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
};

function showBanner(message: string | null): void {
  const banner = el<HTMLDivElement>('banner');
  banner.textContent = message ?? '';
  banner.style.display = message ? 'block' : 'none';
}

function renderLegend(): void {
  const legend = el<HTMLDivElement>('legend-gradient');
  const stops: string[] = [];
  for (let i = 0; i <= 10; i += 1) {
    const t = i / 10;
    const c = colorFor(state.tAmbient + t * (state.tInlet - state.tAmbient), state.tAmbient, state.tInlet);
    stops.push(`${cssColor(c)} ${t * 100}%`);
  }
  legend.style.background = `linear-gradient(to right, ${stops.join(', ')})`;
  el<HTMLSpanElement>('legend-lo').textContent = `${state.tAmbient.toFixed(1)} K`;
  el<HTMLSpanElement>('legend-hi').textContent = `${state.tInlet.toFixed(1)} K`;
}

function renderResponse(response: PredictResponse): void {
  const [inlet, outlet] = response.slices;
  drawSlice(el<HTMLCanvasElement>('inlet-canvas'), inlet, state.tAmbient, state.tInlet);
  drawSlice(el<HTMLCanvasElement>('outlet-canvas'), outlet, state.tAmbient, state.tInlet);

  const displays = sliceDisplays(response);
  el<HTMLSpanElement>('inlet-stats').textContent =
    `min ${displays[0].minLabel} / max ${displays[0].maxLabel} / mean ${displays[0].meanLabel}`;
  el<HTMLSpanElement>('outlet-stats').textContent =
    `min ${displays[1].minLabel} / max ${displays[1].maxLabel} / mean ${displays[1].meanLabel}`;
  el<HTMLSpanElement>('outlet-mean').textContent = outletMeanDisplay(response);

  const indicator = uniformityIndicator(response);
  const badge = el<HTMLSpanElement>('uniformity');
  badge.textContent = indicator.pass
    ? `uniform cooling (spread ratio ${indicator.ratioLabel})`
    : `non-uniform cooling (spread ratio ${indicator.ratioLabel})`;
  badge.className = indicator.pass ? 'badge pass' : 'badge warn';

  el<HTMLSpanElement>('latency').textContent = `${response.latency_ms.toFixed(2)} ms`;
  el<HTMLSpanElement>('extrapolation').textContent = response.extrapolation
    ? 'extrapolating outside the training box'
    : '';

  const curve = el<HTMLElement>('surface-curve');
  curve.setAttribute(
    'points',
    surfaceCurvePoints(response.stations_z, response.surface_means, state.tAmbient, state.tInlet, 560, 140),
  );
  renderLegend();
}

async function predictNow(): Promise<void> {
  const issued = issueRequest(state);
  state = issued.state;
  const seq = issued.seq;
  try {
    const response = await requestPrediction({
      t_ambient: state.tAmbient,
      htc: state.htc,
      slices: [0, nStations - 1],
    });
    state = applyResponse(state, seq, response);
    if (state.lastResponse === response) {
      showBanner(null);
      renderResponse(response);
    }
  } catch (err) {
    state = applyFailure(state, seq, `prediction failed: ${(err as Error).message}`);
    if (state.errorBanner) {
      showBanner(state.errorBanner); // previous plots stay on screen
    }
  }
}

const schedulePredict = debounce(() => {
  void predictNow();
}, 250);

function onSliderInput(): void {
  const ta = Number(el<HTMLInputElement>('t-ambient').value);
  const htc = Number(el<HTMLInputElement>('htc').value);
  state = setSliders(state, ta, htc);
  el<HTMLSpanElement>('t-ambient-value').textContent = `${state.tAmbient.toFixed(1)} K`;
  el<HTMLSpanElement>('htc-value').textContent = `${state.htc.toFixed(0)} W/(m^2 K)`;
  schedulePredict();
}

function renderSpectrum(spectrum: [number, number, number][]): void {
  const svg = el<HTMLElement>('spectrum');
  const bars = spectrum.slice(0, 12);
  const maxLog = Math.log10(bars[0]?.[1] || 1);
  const minLog = Math.log10(bars[bars.length - 1]?.[1] || 1e-16) - 1;
  svg.innerHTML = bars
    .map(([mode, eig], k) => {
      const h = Math.max(2, ((Math.log10(eig) - minLog) / (maxLog - minLog || 1)) * 60);
      return `<rect x="${k * 14}" y="${64 - h}" width="10" height="${h}"><title>mode ${mode}: ${eig.toExponential(2)}</title></rect>`;
    })
    .join('');
}

async function boot(): Promise<void> {
  showBanner(null);
  try {
    const info = await fetchModelInfo();
    state = applyModelInfo(state, info);
    nStations = info.grid.n_stations;

    const taSlider = el<HTMLInputElement>('t-ambient');
    taSlider.min = String(info.parameter_box.t_ambient[0]);
    taSlider.max = String(info.parameter_box.t_ambient[1]);
    taSlider.step = '0.1';
    taSlider.value = String(state.tAmbient);
    const htcSlider = el<HTMLInputElement>('htc');
    htcSlider.min = String(info.parameter_box.htc[0]);
    htcSlider.max = String(info.parameter_box.htc[1]);
    htcSlider.step = '1';
    htcSlider.value = String(state.htc);

    el<HTMLSpanElement>('t-ambient-value').textContent = `${state.tAmbient.toFixed(1)} K`;
    el<HTMLSpanElement>('htc-value').textContent = `${state.htc.toFixed(0)} W/(m^2 K)`;
    el<HTMLSpanElement>('model-modes').textContent = String(info.n_modes);
    renderSpectrum(info.energy_spectrum);
    renderLegend();
    await predictNow();
  } catch (err) {
    showBanner(`could not reach the prediction service: ${(err as Error).message}`);
    el<HTMLButtonElement>('retry').style.display = 'inline-block';
  }
}

export function wire(): void {
  el<HTMLInputElement>('t-ambient').addEventListener('input', onSliderInput);
  el<HTMLInputElement>('htc').addEventListener('input', onSliderInput);
  el<HTMLButtonElement>('retry').addEventListener('click', () => {
    el<HTMLButtonElement>('retry').style.display = 'none';
    void boot();
  });
  void boot();
}

if (typeof document !== 'undefined' && document.getElementById('t-ambient')) {
  wire();
}
