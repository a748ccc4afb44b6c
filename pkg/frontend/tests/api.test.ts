import { afterEach, describe, expect, it, vi } from 'vitest';

import { fetchModelInfo, requestPrediction } from '../src/api.js';

const originalFetch = globalThis.fetch;

afterEach(() => {
  globalThis.fetch = originalFetch;
});

describe('api client', () => {
  it('fetches model info from /model', async () => {
    const payload = { parameter_box: { t_ambient: [288, 298], htc: [218, 320] } };
    globalThis.fetch = vi.fn(async (url: RequestInfo | URL) => {
      expect(String(url)).toBe('/model');
      return new Response(JSON.stringify(payload), { status: 200 });
    }) as typeof fetch;
    const info = await fetchModelInfo();
    expect(info.parameter_box.htc).toEqual([218, 320]);
  });

  it('posts prediction requests as JSON', async () => {
    globalThis.fetch = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe('/predict');
      expect(init?.method).toBe('POST');
      const body = JSON.parse(String(init?.body));
      expect(body).toEqual({ t_ambient: 293, htc: 269, slices: [0, 2] });
      return new Response(JSON.stringify({ summary: { outlet_mean: 330 } }), { status: 200 });
    }) as typeof fetch;
    const resp = await requestPrediction({ t_ambient: 293, htc: 269, slices: [0, 2] });
    expect(resp.summary.outlet_mean).toBe(330);
  });

  it('surfaces server error details', async () => {
    globalThis.fetch = vi.fn(async () =>
      new Response(JSON.stringify({ error: 'htc must be a finite number' }), { status: 400 }),
    ) as typeof fetch;
    await expect(
      requestPrediction({ t_ambient: 293, htc: Number.NaN, slices: [] }),
    ).rejects.toThrow(/400.*htc must be a finite number/);
  });

  it('throws on unreachable service', async () => {
    globalThis.fetch = vi.fn(async () => {
      throw new TypeError('fetch failed');
    }) as typeof fetch;
    await expect(fetchModelInfo()).rejects.toThrow('fetch failed');
  });
});
