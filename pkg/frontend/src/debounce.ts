/** Trailing-edge debouncer: rapid calls collapse into one invocation
 * delay ms after the last call, so slider drags issue at most
 * 1000/delay requests per second.  The timer functions are injectable
 * for testing. */

export interface TimerApi {
  set(fn: () => void, ms: number): unknown;
  clear(handle: unknown): void;
}

const realTimers: TimerApi = {
  set: (fn, ms) => setTimeout(fn, ms),
  clear: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs = 250,
  timers: TimerApi = realTimers,
): (...args: A) => void {
  let pending: unknown = null;
  return (...args: A) => {
    if (pending !== null) {
      timers.clear(pending);
    }
    pending = timers.set(() => {
      pending = null;
      fn(...args);
    }, delayMs);
  };
}
