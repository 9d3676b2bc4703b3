/** Thin client for the render service; all pixels come from it. */

export interface SceneInfo {
  sceneId: string;
  width: number;
  height: number;
}

export interface SceneFiles {
  shape: File;
  i0: File;
  i1: File;
  env: File;
  bg: File;
  ks?: File;
  spec_color?: File;
}

export function renderUrl(baseUrl: string, sceneId: string, query: Record<string, string>): string {
  const qs = new URLSearchParams(query).toString();
  const root = baseUrl.replace(/\/+$/, "");
  return `${root}/scenes/${encodeURIComponent(sceneId)}/render${qs ? "?" + qs : ""}`;
}

export function sceneDocument(shapeKind: "normalmap" | "depthmap", files: SceneFiles): string {
  const doc: Record<string, unknown> = {
    shape_kind: shapeKind,
    shape: files.shape.name,
    i0: files.i0.name,
    i1: files.i1.name,
    env: files.env.name,
    bg: files.bg.name,
    lights: [{ kind: "directional", direction: [0, 0, 1], color: [1, 1, 1] }],
  };
  if (files.ks) doc.ks = files.ks.name;
  if (files.spec_color) doc.spec_color = files.spec_color.name;
  return JSON.stringify(doc);
}

export async function uploadScene(
  baseUrl: string,
  shapeKind: "normalmap" | "depthmap",
  files: SceneFiles,
  fetchFn: typeof fetch = fetch,
): Promise<SceneInfo> {
  const form = new FormData();
  form.append("scene", sceneDocument(shapeKind, files));
  for (const key of ["shape", "i0", "i1", "env", "bg", "ks", "spec_color"] as const) {
    const f = files[key];
    if (f) form.append(key, f, f.name);
  }
  const root = baseUrl.replace(/\/+$/, "");
  const resp = await fetchFn(`${root}/scenes`, { method: "POST", body: form });
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      detail = ((await resp.json()) as { detail?: string }).detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new Error(`scene upload failed: ${detail}`);
  }
  const body = (await resp.json()) as { scene_id: string; width: number; height: number };
  return { sceneId: body.scene_id, width: body.width, height: body.height };
}

export async function fetchRenderBlob(url: string, fetchFn: typeof fetch = fetch): Promise<Blob> {
  const resp = await fetchFn(url);
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      detail = ((await resp.json()) as { detail?: string }).detail ?? detail;
    } catch {
      /* ignore */
    }
    throw new Error(`render failed: ${detail}`);
  }
  return resp.blob();
}
