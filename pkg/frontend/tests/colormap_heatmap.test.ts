import { describe, expect, it } from 'vitest';

import { colorFor, cssColor, normalize } from '../src/colormap.js';
import { sliceToPixels, surfaceCurvePoints } from '../src/heatmap.js';
import type { SliceField } from '../src/types.js';

describe('fixed color scale', () => {
  it('anchors to [t_ambient, t_inlet], not to the data', () => {
    expect(normalize(293, 293, 473)).toBe(0);
    expect(normalize(473, 293, 473)).toBe(1);
    expect(normalize(383, 293, 473)).toBeCloseTo(0.5);
  });

  it('clamps out-of-scale values', () => {
    expect(normalize(280, 293, 473)).toBe(0);
    expect(normalize(500, 293, 473)).toBe(1);
  });

  it('endpoints map to the scale extremes', () => {
    expect(cssColor(colorFor(293, 293, 473))).toBe('rgb(33,102,172)');
    expect(cssColor(colorFor(473, 293, 473))).toBe('rgb(178,24,43)');
  });

  it('degenerate scale does not divide by zero', () => {
    expect(normalize(300, 300, 300)).toBe(0);
  });
});

describe('slice rasterization', () => {
  const slice: SliceField = {
    station: 0,
    z: 0,
    nx: 3,
    ny: 2,
    dx: 0.001,
    // row-major mask: row j=0 is [0,1,1], row j=1 is [1,0,0]
    mask: [0, 1, 1, 1, 0, 0],
    values: [293, 473, 383], // compact order follows the mask scan
  };

  it('paints interior cells and leaves exterior transparent', () => {
    const px = sliceToPixels(slice, 293, 473);
    expect(px.length).toBe(3 * 2 * 4);
    // grid row j=0 lands on screen row 1 (flipped)
    const at = (i: number, row: number) => (row * 3 + i) * 4;
    expect(px[at(0, 1) + 3]).toBe(0); // exterior: alpha 0
    expect(px[at(1, 1) + 3]).toBe(255); // value 293 -> cold end
    expect(px.slice(at(1, 1), at(1, 1) + 3)).toEqual(new Uint8ClampedArray([33, 102, 172]));
    expect(px.slice(at(2, 1), at(2, 1) + 3)).toEqual(new Uint8ClampedArray([178, 24, 43]));
    expect(px[at(0, 0) + 3]).toBe(255); // grid row 1 on screen row 0
  });
});

describe('surface curve', () => {
  it('maps stations to x and temperatures to y within the fixed scale', () => {
    const points = surfaceCurvePoints([0, 0.5, 1.0], [473, 383, 293], 293, 473, 100, 100);
    expect(points).toBe('0.0,0.0 50.0,50.0 100.0,100.0');
  });
});
