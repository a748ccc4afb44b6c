import type { ModelInfo, PredictRequest, PredictResponse } from './types.js';

export async function fetchModelInfo(base = ''): Promise<ModelInfo> {
  const res = await fetch(`${base}/model`);
  if (!res.ok) {
    throw new Error(`model info failed: ${res.status}`);
  }
  return res.json();
}

export async function requestPrediction(
  req: PredictRequest,
  base = '',
): Promise<PredictResponse> {
  const res = await fetch(`${base}/predict`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(req),
  });
  if (!res.ok) {
    const detail = await res
      .json()
      .then((b: { error?: string }) => b.error ?? '')
      .catch(() => '');
    throw new Error(`prediction failed: ${res.status}${detail ? ` (${detail})` : ''}`);
  }
  return res.json();
}
