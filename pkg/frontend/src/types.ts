export interface ParameterBox {
  t_ambient: [number, number];
  htc: [number, number];
}

export interface GridSummary {
  nx: number;
  ny: number;
  dx: number;
  n_interior: number;
  n_boundary_faces: number;
  n_stations: number;
  stations_z: number[];
  length: number;
}

export interface ModelInfo {
  parameter_box: ParameterBox;
  n_modes: number;
  t_inlet: number;
  grid: GridSummary;
  hashes: Record<string, string>;
  energy_spectrum: [number, number, number][]; // [mode, eigenvalue, cumulative fraction]
  param_names: string[];
}

export interface PredictRequest {
  t_ambient: number;
  htc: number;
  slices: number[];
}

export interface SliceField {
  station: number;
  z: number;
  nx: number;
  ny: number;
  dx: number;
  values: number[]; // interior cells in row-major scan order
  mask: number[]; // nx*ny row-major, 1 = interior
}

export interface SliceStats {
  station: number;
  min: number;
  max: number;
  mean: number;
}

export interface PredictSummary {
  min: number;
  max: number;
  mean: number;
  outlet_mean: number;
  outlet_max: number;
  outlet_large_core_mean: number;
  outlet_small_core_mean: number;
  outlet_surface_std: number;
  outlet_spread_ratio: number;
}

export interface PredictResponse {
  summary: PredictSummary;
  slice_stats: SliceStats[];
  slices: SliceField[];
  surface_means: number[];
  stations_z: number[];
  extrapolation: boolean;
  latency_ms: number;
}
