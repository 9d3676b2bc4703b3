/** Viewer parameter state and its projection onto render query strings.
 *
 * The viewer never computes pixels itself; every control simply becomes a
 * query parameter on the next render request. Parameters matching the
 * scene's stored defaults are omitted so the URL stays readable.
 */

import { LightDirection } from "./light.js";

export interface ViewerParams {
  t0: number;
  t1: number;
  step: "linear" | "smooth-step" | "smoother-step";
  shadow: boolean;
  shadowD: number;
  shadowA: number;
  refractionMode: "physical" | "artistic";
  eta: number;
  mu: number;
  fresnelMode: "physical" | "artistic" | "fixed";
  fixedF: number;
  x0: number;
  x1: number;
  blend: number;
  envBlur: number;
  bgBlur: number;
  elevation: number;
}

export const FRESNEL_GAP = 0.01;

export function defaultParams(): ViewerParams {
  return {
    t0: 0,
    t1: 1,
    step: "linear",
    shadow: false,
    shadowD: 0.02,
    shadowA: 0.0025,
    refractionMode: "physical",
    eta: 1.5,
    mu: 0,
    fresnelMode: "physical",
    fixedF: 0.5,
    x0: 0.3,
    x1: 0.8,
    blend: 0,
    envBlur: 0,
    bgBlur: 0,
    elevation: 1,
  };
}

/** Move x0, refusing to cross x1 (keeps x0 < x1 invariant client-side). */
export function setX0(p: ViewerParams, value: number): void {
  p.x0 = Math.min(Math.max(value, 0), p.x1 - FRESNEL_GAP);
}

/** Move x1, refusing to cross x0. */
export function setX1(p: ViewerParams, value: number): void {
  p.x1 = Math.max(Math.min(value, 1), p.x0 + FRESNEL_GAP);
}

function fmt(x: number): string {
  return String(Math.round(x * 1e6) / 1e6);
}

export function toQuery(p: ViewerParams, light: LightDirection | null): Record<string, string> {
  const q: Record<string, string> = {};
  if (light) {
    q.lx = fmt(light.lx);
    q.ly = fmt(light.ly);
    q.lz = fmt(light.lz);
  }
  q.t0 = fmt(p.t0);
  q.t1 = fmt(p.t1);
  if (p.step !== "linear") q.step = p.step;
  q.shadow = p.shadow ? "1" : "0";
  if (p.shadow) {
    q.d = fmt(p.shadowD);
    q.a = fmt(p.shadowA);
  }
  q.refraction_mode = p.refractionMode;
  if (p.refractionMode === "physical") {
    q.eta = fmt(p.eta);
  } else {
    q.mu = fmt(p.mu);
  }
  q.fresnel_mode = p.fresnelMode;
  if (p.fresnelMode === "fixed") {
    q.fixed_f = fmt(p.fixedF);
  } else if (p.fresnelMode === "artistic") {
    q.x0 = fmt(p.x0);
    q.x1 = fmt(p.x1);
    q.blend = fmt(p.blend);
  }
  if (p.envBlur > 0) q.env_blur = fmt(p.envBlur);
  if (p.bgBlur > 0) q.bg_blur = fmt(p.bgBlur);
  return q;
}
