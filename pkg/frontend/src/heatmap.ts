import { colorFor } from './colormap.js';
import type { SliceField } from './types.js';

/** RGBA pixel buffer for one cross-section slice.  Interior cells take the
 * fixed color scale; exterior cells stay transparent.  Row 0 of the grid is
 * the bottom of the profile, so rows are flipped for screen coordinates. */
export function sliceToPixels(
  slice: SliceField,
  tAmbient: number,
  tInlet: number,
): Uint8ClampedArray<ArrayBuffer> {
  const { nx, ny, mask, values } = slice;
  const pixels = new Uint8ClampedArray(new ArrayBuffer(nx * ny * 4));
  let compact = 0;
  for (let j = 0; j < ny; j += 1) {
    for (let i = 0; i < nx; i += 1) {
      if (mask[j * nx + i] !== 1) {
        continue;
      }
      const value = values[compact];
      compact += 1;
      const { r, g, b } = colorFor(value, tAmbient, tInlet);
      const row = ny - 1 - j; // screen y grows downward
      const off = (row * nx + i) * 4;
      pixels[off] = r;
      pixels[off + 1] = g;
      pixels[off + 2] = b;
      pixels[off + 3] = 255;
    }
  }
  return pixels;
}

export function drawSlice(
  canvas: HTMLCanvasElement,
  slice: SliceField,
  tAmbient: number,
  tInlet: number,
  scale = 6,
): void {
  const { nx, ny } = slice;
  canvas.width = nx * scale;
  canvas.height = ny * scale;
  const ctx = canvas.getContext('2d');
  if (!ctx) {
    return;
  }
  const pixels = sliceToPixels(slice, tAmbient, tInlet);
  const tile = new OffscreenCanvas(nx, ny);
  const tileCtx = tile.getContext('2d');
  if (!tileCtx) {
    return;
  }
  tileCtx.putImageData(new ImageData(pixels, nx, ny), 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(tile, 0, 0, canvas.width, canvas.height);
}

/** Polyline points for the axial surface-temperature curve, mapped into an
 * SVG viewport.  The y range is pinned to [t_ambient, t_inlet] like the
 * heatmaps. */
export function surfaceCurvePoints(
  stationsZ: number[],
  surfaceMeans: number[],
  tAmbient: number,
  tInlet: number,
  width: number,
  height: number,
): string {
  const zMax = stationsZ[stationsZ.length - 1] || 1;
  const span = tInlet - tAmbient || 1;
  return stationsZ
    .map((z, k) => {
      const x = (z / zMax) * width;
      const y = height - ((surfaceMeans[k] - tAmbient) / span) * height;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(' ');
}
