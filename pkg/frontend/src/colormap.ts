/** Fixed blue-to-red color scale over [t_ambient, t_inlet].  The scale is
 * anchored to the operating point rather than the field values so two
 * scenarios stay visually comparable. */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

const STOPS: [number, Rgb][] = [
  [0.0, { r: 33, g: 102, b: 172 }],
  [0.25, { r: 146, g: 197, b: 222 }],
  [0.5, { r: 247, g: 247, b: 247 }],
  [0.75, { r: 244, g: 165, b: 130 }],
  [1.0, { r: 178, g: 24, b: 43 }],
];

export function normalize(value: number, tAmbient: number, tInlet: number): number {
  if (tInlet === tAmbient) {
    return 0;
  }
  const t = (value - tAmbient) / (tInlet - tAmbient);
  return Math.min(1, Math.max(0, t));
}

export function colorFor(value: number, tAmbient: number, tInlet: number): Rgb {
  const t = normalize(value, tAmbient, tInlet);
  for (let i = 1; i < STOPS.length; i += 1) {
    const [t1, c1] = STOPS[i];
    if (t <= t1) {
      const [t0, c0] = STOPS[i - 1];
      const f = t1 === t0 ? 0 : (t - t0) / (t1 - t0);
      return {
        r: Math.round(c0.r + f * (c1.r - c0.r)),
        g: Math.round(c0.g + f * (c1.g - c0.g)),
        b: Math.round(c0.b + f * (c1.b - c0.b)),
      };
    }
  }
  return STOPS[STOPS.length - 1][1];
}

export function cssColor(c: Rgb): string {
  return `rgb(${c.r},${c.g},${c.b})`;
}
