import type { ModelInfo, ParameterBox, PredictResponse } from './types.js';

/** Everything the panel shows derives from this state plus the last payload;
 * the view only formats, it never computes new numbers. */
export interface UiState {
  box: ParameterBox | null;
  tInlet: number;
  tAmbient: number;
  htc: number;
  inFlight: boolean;
  lastResponse: PredictResponse | null;
  errorBanner: string | null;
  /** sequence number of the newest issued request; older responses are stale */
  latestSeq: number;
  appliedSeq: number;
}

export function initialState(): UiState {
  return {
    box: null,
    tInlet: 0,
    tAmbient: 0,
    htc: 0,
    inFlight: false,
    lastResponse: null,
    errorBanner: null,
    latestSeq: 0,
    appliedSeq: 0,
  };
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

export function applyModelInfo(state: UiState, info: ModelInfo): UiState {
  const box = info.parameter_box;
  const mid = (r: [number, number]) => 0.5 * (r[0] + r[1]);
  return {
    ...state,
    box,
    tInlet: info.t_inlet,
    tAmbient: mid(box.t_ambient),
    htc: mid(box.htc),
    errorBanner: null,
  };
}

export function setSliders(state: UiState, tAmbient: number, htc: number): UiState {
  if (!state.box) {
    return state;
  }
  return {
    ...state,
    tAmbient: clamp(tAmbient, state.box.t_ambient[0], state.box.t_ambient[1]),
    htc: clamp(htc, state.box.htc[0], state.box.htc[1]),
  };
}

export function issueRequest(state: UiState): { state: UiState; seq: number } {
  const seq = state.latestSeq + 1;
  return { state: { ...state, latestSeq: seq, inFlight: true }, seq };
}

/** Stale responses (an older seq than the newest applied/issued) are dropped. */
export function applyResponse(
  state: UiState,
  seq: number,
  response: PredictResponse,
): UiState {
  if (seq < state.latestSeq || seq <= state.appliedSeq) {
    return state;
  }
  return {
    ...state,
    appliedSeq: seq,
    inFlight: false,
    lastResponse: response,
    errorBanner: null,
  };
}

export function applyFailure(state: UiState, seq: number, message: string): UiState {
  if (seq < state.latestSeq) {
    return state; // a newer request is already out; keep the previous plots
  }
  return { ...state, inFlight: false, errorBanner: message };
}

// --- display formatting: every number shown comes verbatim from the payload

export function formatKelvin(value: number): string {
  return `${value.toFixed(2)} K`;
}

export interface SliceDisplay {
  station: number;
  minLabel: string;
  maxLabel: string;
  meanLabel: string;
}

export function sliceDisplays(response: PredictResponse): SliceDisplay[] {
  return response.slice_stats.map((s) => ({
    station: s.station,
    minLabel: formatKelvin(s.min),
    maxLabel: formatKelvin(s.max),
    meanLabel: formatKelvin(s.mean),
  }));
}

export function outletMeanDisplay(response: PredictResponse): string {
  return formatKelvin(response.summary.outlet_mean);
}

export const UNIFORMITY_THRESHOLD = 0.1;

export interface UniformityIndicator {
  ratioLabel: string;
  pass: boolean;
}

export function uniformityIndicator(response: PredictResponse): UniformityIndicator {
  const ratio = response.summary.outlet_spread_ratio;
  return {
    ratioLabel: ratio.toFixed(3),
    pass: ratio < UNIFORMITY_THRESHOLD,
  };
}
