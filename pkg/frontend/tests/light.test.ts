import { describe, expect, it } from "vitest";

import { MIN_ELEVATION, pointerToLight } from "../src/light.js";

describe("pointerToLight", () => {
  it("maps the canvas center to the overhead light", () => {
    const l = pointerToLight(0.5, 0.5, 1);
    expect(l.lx).toBe(0);
    expect(l.ly).toBe(-0);
    expect(l.lz).toBe(1);
  });

  it("maps right of center to +x, up to +y", () => {
    const right = pointerToLight(1, 0.5, 1);
    expect(right.lx).toBeGreaterThan(0);
    expect(Math.abs(right.ly)).toBeLessThan(1e-12);
    const top = pointerToLight(0.5, 0, 1);
    expect(top.ly).toBeGreaterThan(0);
  });

  it("always returns a unit vector", () => {
    for (const [u, v, h] of [
      [0, 0, 1],
      [1, 1, 0.3],
      [0.25, 0.9, 2],
      [0.5, 0.5, 0.05],
    ] as const) {
      const l = pointerToLight(u, v, h);
      expect(Math.hypot(l.lx, l.ly, l.lz)).toBeCloseTo(1, 12);
    }
  });

  it("clamps elevation so lz stays positive below the horizon", () => {
    const l = pointerToLight(1, 1, 0);
    expect(l.lz).toBeGreaterThan(0);
    const floor = pointerToLight(1, 1, -5);
    expect(floor.lz).toBeCloseTo(
      MIN_ELEVATION / Math.hypot(1, 1, MIN_ELEVATION),
      12,
    );
  });
});
