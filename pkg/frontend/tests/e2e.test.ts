/** Live end-to-end test: builds a small model bundle with the Python CLI,
 * serves it, and drives the UI state/view-model against the real service. */

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { fetchModelInfo, requestPrediction } from '../src/api.js';
import {
  applyModelInfo,
  initialState,
  outletMeanDisplay,
  setSliders,
  sliceDisplays,
} from '../src/state.js';

const PYTHON = process.env.CALIBROM_PYTHON ?? 'python3';

// small but real: coarse voxels, 3 stored stations, 12/6/6 samples
const DEMO_CONFIG = {
  name: 'ui-e2e',
  discretization: { dx: 1.0e-3, nz: 11, z_stride: 5, cg_tol: 1e-10, cg_max_iter: 4000 },
  sampling: {
    t_ambient: [288.0, 298.0],
    htc: [218.0, 320.0],
    n_train: 12,
    n_val: 6,
    n_test: 6,
    seeds: [42, 43, 44],
  },
  rom: { n_modes: 4, tol_rank: 1e-12 },
  network: { input_dim: 2, hidden_layers: 2, hidden_width: 16, output_dim: 4 },
  training: {
    learning_rate: 1e-3,
    beta1: 0.9,
    beta2: 0.999,
    eps: 1e-8,
    max_epochs: 4000,
    patience: 800,
    batch_size: null,
    seed: 11,
  },
};

let workdir: string;
let server: ChildProcess | null = null;
let base = '';

function pythonAvailable(): boolean {
  const probe = spawnSync(PYTHON, ['-c', 'import calibrom'], { encoding: 'utf-8' });
  return probe.status === 0;
}

const HAVE_PYTHON = pythonAvailable();

beforeAll(async () => {
  if (!HAVE_PYTHON) {
    return;
  }
  workdir = mkdtempSync(join(tmpdir(), 'calibrom-e2e-'));
  const configPath = join(workdir, 'demo.json');
  writeFileSync(configPath, JSON.stringify(DEMO_CONFIG));
  const modelPath = join(workdir, 'model.romb');

  const build = spawnSync(
    PYTHON,
    ['-m', 'calibrom.cli', 'build', '--config', configPath, '--out', modelPath],
    { encoding: 'utf-8', timeout: 150000 },
  );
  if (build.status !== 0) {
    throw new Error(`bundle build failed:\n${build.stderr}`);
  }

  server = spawn(PYTHON, [
    '-m',
    'calibrom.cli',
    'serve',
    '--model',
    modelPath,
    '--bind',
    '127.0.0.1:0',
  ]);
  base = await new Promise<string>((resolve, reject) => {
    let out = '';
    const timer = setTimeout(() => reject(new Error(`server did not start:\n${out}`)), 30000);
    server!.stdout!.on('data', (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/serving on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    server!.on('exit', (code) => reject(new Error(`server exited early (${code})`)));
  });
}, 180000);

afterAll(() => {
  if (server) {
    server.kill('SIGTERM');
  }
  if (workdir) {
    rmSync(workdir, { recursive: true, force: true });
  }
});

describe.runIf(HAVE_PYTHON)('live service', () => {
  it('slider bounds equal the /model parameter box', async () => {
    const info = await fetchModelInfo(base);
    expect(info.parameter_box.t_ambient).toEqual([288.0, 298.0]);
    expect(info.parameter_box.htc).toEqual([218.0, 320.0]);
    const state = applyModelInfo(initialState(), info);
    expect(state.box).toEqual(info.parameter_box);
    // clamping respects exactly these bounds
    expect(setSliders(state, 1000, 1000).tAmbient).toBe(298.0);
    expect(setSliders(state, 0, 0).htc).toBe(218.0);
  });

  it('displayed min/max equal the /predict summary values', async () => {
    const info = await fetchModelInfo(base);
    const last = info.grid.n_stations - 1;
    const resp = await requestPrediction(
      { t_ambient: 293.0, htc: 269.0, slices: [0, last] },
      base,
    );
    const displays = sliceDisplays(resp);
    for (const [k, stats] of resp.slice_stats.entries()) {
      expect(displays[k].minLabel).toBe(`${stats.min.toFixed(2)} K`);
      expect(displays[k].maxLabel).toBe(`${stats.max.toFixed(2)} K`);
      // the stats themselves agree with a client-side recompute of the slice
      const values = resp.slices[k].values;
      expect(Math.abs(stats.min - Math.min(...values))).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(stats.max - Math.max(...values))).toBeLessThanOrEqual(1e-9);
    }
    // inlet is the Dirichlet boundary
    expect(Math.abs(resp.slice_stats[0].min - info.t_inlet)).toBeLessThanOrEqual(1e-6);
    expect(Math.abs(resp.slice_stats[0].max - info.t_inlet)).toBeLessThanOrEqual(1e-6);
  });

  it('increasing htc decreases the displayed outlet mean', async () => {
    const low = await requestPrediction({ t_ambient: 293.0, htc: 218.0, slices: [] }, base);
    const high = await requestPrediction({ t_ambient: 293.0, htc: 320.0, slices: [] }, base);
    expect(high.summary.outlet_mean).toBeLessThan(low.summary.outlet_mean);
    const shownLow = Number.parseFloat(outletMeanDisplay(low));
    const shownHigh = Number.parseFloat(outletMeanDisplay(high));
    expect(shownHigh).toBeLessThan(shownLow);
  });

  it('rejects malformed requests with 400', async () => {
    const res = await fetch(`${base}/predict`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: '{broken',
    });
    expect(res.status).toBe(400);
  });
});

describe.runIf(!HAVE_PYTHON)('live service (skipped)', () => {
  it('python with calibrom is not available', () => {
    expect(HAVE_PYTHON).toBe(false);
  });
});
