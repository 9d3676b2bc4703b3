/** Pointer-to-light mapping for the canvas overlay.
 *
 * Canvas position (u, v) in [0, 1]^2 maps to the directional light
 * normalize(2u - 1, -(2v - 1), elevation). The elevation slider is
 * clamped to a small positive floor so the request always satisfies the
 * service's lz > 0 precondition, however far the pointer is dragged.
 */

export interface LightDirection {
  lx: number;
  ly: number;
  lz: number;
}

export const MIN_ELEVATION = 0.05;

export function pointerToLight(u: number, v: number, elevation: number): LightDirection {
  const h = Math.max(elevation, MIN_ELEVATION);
  const x = 2 * u - 1;
  const y = -(2 * v - 1);
  const n = Math.hypot(x, y, h);
  return { lx: x / n, ly: y / n, lz: h / n };
}
