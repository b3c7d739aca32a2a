/** Single-page operator loop: view slices, click a seed, segment, inspect
 *  contours and metrics. All displayed values come from service responses. */

import { ApiClient, ApiError } from "./api.js";
import type { Api, Axis, SegmentResponse, VolumeInfo } from "./api.js";
import {
  AUTO_COLOR,
  TRUTH_COLOR,
  renderContours,
  renderSeed,
  clearGroup,
} from "./overlay.js";
import {
  DEFAULT_PARAMS,
  KEY_AXIS,
  clampIndex,
  indexForAxis,
  pixelToVoxel,
  sliceCount,
  sliceSize,
  voxelToPixel,
} from "./state.js";
import type { Vec3, ViewerState } from "./state.js";

export const ZOOM = 4;

export interface AppHandle {
  /** Resolves when the volume info has loaded and the first slice is shown. */
  ready: Promise<void>;
  /** Resolves when every queued request so far has settled. */
  idle(): Promise<void>;
  getState(): ViewerState;
}

const TEMPLATE = `
<div class="toolbar">
  <span class="axis-buttons">
    <button type="button" data-axis="z" title="axial (a)">axial</button>
    <button type="button" data-axis="x" title="sagittal (s)">sagittal</button>
    <button type="button" data-axis="y" title="coronal (c)">coronal</button>
  </span>
  <label>slice <input id="slice-slider" type="range" min="0" value="0">
    <span id="slice-label"></span></label>
  <label>window <input id="window-lo" type="number" step="any">
    .. <input id="window-hi" type="number" step="any"></label>
</div>
<div class="viewport">
  <img id="slice-img" alt="slice" draggable="false">
  <svg id="overlay" preserveAspectRatio="none">
    <g id="truth-contours"></g>
    <g id="auto-contours"></g>
    <g id="seed-layer"></g>
  </svg>
</div>
<div class="panel">
  <label>&#916;r <input id="delta-r" type="range" min="0" max="8" value="1">
    <span id="delta-r-value">1</span></label>
  <label>subdiv <input id="subdiv" type="number" min="0" max="6" value="3"></label>
  <label>samples <input id="samples" type="number" min="2" value="60"></label>
  <label>radius mm <input id="radius-mm" type="number" min="1" step="any" value="50"></label>
  <button id="segment-btn" type="button">Segment</button>
  <label id="show-auto-label"><input id="show-auto" type="checkbox" checked> auto</label>
  <label id="show-truth-label"><input id="show-truth" type="checkbox" checked> truth</label>
  <div id="status" role="alert"></div>
  <div id="runtime-badge" hidden></div>
  <div id="volume-readout" hidden></div>
  <div id="dsc-readout" hidden></div>
  <div id="sphere-note" hidden>sphere mode: all boundary indices equal</div>
</div>
`;

export function createApp(root: HTMLElement, api: Api): AppHandle {
  root.innerHTML = TEMPLATE;
  const doc = root.ownerDocument;

  function $<T extends Element>(sel: string): T {
    const el = root.querySelector(sel);
    if (!el) throw new Error(`missing element ${sel}`);
    return el as T;
  }

  const img = $<HTMLImageElement>("#slice-img");
  const overlay = $<SVGSVGElement>("#overlay");
  const truthGroup = $<SVGGElement>("#truth-contours");
  const autoGroup = $<SVGGElement>("#auto-contours");
  const seedGroup = $<SVGGElement>("#seed-layer");
  const slider = $<HTMLInputElement>("#slice-slider");
  const sliceLabel = $<HTMLElement>("#slice-label");
  const windowLo = $<HTMLInputElement>("#window-lo");
  const windowHi = $<HTMLInputElement>("#window-hi");
  const deltaR = $<HTMLInputElement>("#delta-r");
  const deltaRValue = $<HTMLElement>("#delta-r-value");
  const subdiv = $<HTMLInputElement>("#subdiv");
  const samples = $<HTMLInputElement>("#samples");
  const radiusMm = $<HTMLInputElement>("#radius-mm");
  const segmentBtn = $<HTMLButtonElement>("#segment-btn");
  const showAuto = $<HTMLInputElement>("#show-auto");
  const showTruth = $<HTMLInputElement>("#show-truth");
  const showTruthLabel = $<HTMLElement>("#show-truth-label");
  const status = $<HTMLElement>("#status");
  const runtimeBadge = $<HTMLElement>("#runtime-badge");
  const volumeReadout = $<HTMLElement>("#volume-readout");
  const dscReadout = $<HTMLElement>("#dsc-readout");
  const sphereNote = $<HTMLElement>("#sphere-note");

  let info: VolumeInfo | null = null;
  const state: ViewerState = {
    axis: "z",
    index: 0,
    window: [0, 1],
    seed: null,
    params: { ...DEFAULT_PARAMS },
    resultId: null,
    showAuto: true,
    showTruth: true,
  };

  // serial request queue: UI ops run one at a time, in click order
  let queue: Promise<void> = Promise.resolve();
  let segmentInFlight = false;

  function enqueue(op: () => Promise<void>): Promise<void> {
    queue = queue.then(op, op);
    return queue;
  }

  function setStatus(message: string): void {
    status.textContent = message;
  }

  function dims(): Vec3 {
    if (!info) throw new Error("volume info not loaded");
    return info.dims;
  }

  function updateSliceView(): void {
    const { w, h } = sliceSize(dims(), state.axis);
    img.src = api.sliceUrl(state.axis, state.index, state.window);
    img.style.width = `${w * ZOOM}px`;
    img.style.height = `${h * ZOOM}px`;
    // half-pixel shift: integer coordinates are pixel centers
    overlay.setAttribute("viewBox", `-0.5 -0.5 ${w} ${h}`);
    overlay.style.width = `${w * ZOOM}px`;
    overlay.style.height = `${h * ZOOM}px`;
    slider.max = String(sliceCount(dims(), state.axis) - 1);
    slider.value = String(state.index);
    sliceLabel.textContent =
      `${state.axis} ${state.index}/${sliceCount(dims(), state.axis) - 1}`;
    for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-axis]")) {
      btn.classList.toggle("active", btn.dataset.axis === state.axis);
    }
  }

  function updateSeedMarker(): void {
    clearGroup(seedGroup);
    if (!state.seed) return;
    const { px, py, slice } = voxelToPixel(state.axis, state.seed);
    if (slice === state.index) renderSeed(seedGroup, px, py);
  }

  async function refreshContours(): Promise<void> {
    updateSeedMarker();
    autoGroup.style.display = state.showAuto ? "" : "none";
    truthGroup.style.display = state.showTruth ? "" : "none";
    if (state.resultId !== null && state.showAuto) {
      const loops = await api.resultContour(state.resultId, state.axis, state.index);
      renderContours(autoGroup, loops, "contour-auto", AUTO_COLOR);
    } else {
      clearGroup(autoGroup);
    }
    if (info && info.has_truth && state.showTruth) {
      const loops = await api.truthContour(state.axis, state.index);
      renderContours(truthGroup, loops, "contour-truth", TRUTH_COLOR);
    } else {
      clearGroup(truthGroup);
    }
  }

  function moveToSlice(index: number): void {
    state.index = clampIndex(dims(), state.axis, index);
    updateSliceView();
    void enqueue(async () => {
      try {
        await refreshContours();
      } catch (err) {
        setStatus(err instanceof Error ? err.message : String(err));
      }
    });
  }

  function switchAxis(axis: Axis): void {
    if (!info || axis === state.axis) return;
    state.axis = axis;
    moveToSlice(indexForAxis(dims(), axis, state.seed));
  }

  function showResponse(resp: SegmentResponse): void {
    state.resultId = resp.result_id;
    const phases = Object.entries(resp.phase_ms)
      .map(([k, v]) => `${k} ${v.toFixed(1)}`)
      .join("  ");
    runtimeBadge.textContent = `${resp.runtime_ms.toFixed(1)} ms  (${phases})`;
    runtimeBadge.dataset.runtimeMs = String(resp.runtime_ms);
    runtimeBadge.hidden = false;
    volumeReadout.textContent = `volume ${resp.volume_mm3.toFixed(1)} mm³`;
    volumeReadout.dataset.volumeMm3 = String(resp.volume_mm3);
    volumeReadout.hidden = false;
    if (resp.dsc_pct !== undefined) {
      dscReadout.textContent = `DSC ${resp.dsc_pct.toFixed(2)} %`;
      dscReadout.dataset.dsc = String(resp.dsc_pct);
      dscReadout.hidden = false;
    } else {
      dscReadout.hidden = true;
    }
    sphereNote.hidden = resp.boundary_stats.min !== resp.boundary_stats.max;
  }

  function runSegment(): void {
    if (segmentInFlight) return;
    if (!state.seed) {
      setStatus("click the image to place a seed first");
      return;
    }
    const seed = state.seed;
    segmentInFlight = true;
    segmentBtn.disabled = true;
    setStatus("segmenting…");
    void enqueue(async () => {
      try {
        const resp = await api.segment({
          seed,
          delta_r: state.params.delta_r,
          subdiv: state.params.subdiv,
          samples: state.params.samples,
          radius_mm: state.params.radius_mm,
        });
        showResponse(resp);
        setStatus("");
        await refreshContours();
      } catch (err) {
        if (err instanceof ApiError) {
          setStatus(`segmentation failed: ${err.message}`);
        } else {
          setStatus(err instanceof Error ? err.message : String(err));
        }
      } finally {
        segmentInFlight = false;
        segmentBtn.disabled = false;
      }
    });
  }

  function onImageClick(ev: MouseEvent): void {
    if (!info) return;
    const rect = img.getBoundingClientRect();
    const { w, h } = sliceSize(dims(), state.axis);
    const px = Math.min(Math.max(Math.floor((ev.clientX - rect.left) / ZOOM), 0), w - 1);
    const py = Math.min(Math.max(Math.floor((ev.clientY - rect.top) / ZOOM), 0), h - 1);
    state.seed = pixelToVoxel(state.axis, state.index, px, py);
    setStatus("");
    updateSeedMarker();
  }

  function onKey(ev: KeyboardEvent): void {
    const target = ev.target as Element | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    if (!info) return;
    const axis = KEY_AXIS[ev.key];
    if (axis) {
      switchAxis(axis);
      return;
    }
    if (ev.key === "ArrowUp" || ev.key === "ArrowRight") moveToSlice(state.index + 1);
    else if (ev.key === "ArrowDown" || ev.key === "ArrowLeft") moveToSlice(state.index - 1);
  }

  img.addEventListener("click", onImageClick);
  doc.addEventListener("keydown", onKey);
  segmentBtn.addEventListener("click", runSegment);
  slider.addEventListener("input", () => moveToSlice(Number(slider.value)));
  for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-axis]")) {
    btn.addEventListener("click", () => switchAxis(btn.dataset.axis as Axis));
  }
  deltaR.addEventListener("input", () => {
    state.params.delta_r = Number(deltaR.value);
    deltaRValue.textContent = deltaR.value;
  });
  subdiv.addEventListener("input", () => {
    state.params.subdiv = Number(subdiv.value);
  });
  samples.addEventListener("input", () => {
    state.params.samples = Number(samples.value);
  });
  radiusMm.addEventListener("input", () => {
    state.params.radius_mm = Number(radiusMm.value);
  });
  const applyWindow = (): void => {
    const lo = Number(windowLo.value);
    const hi = Number(windowHi.value);
    if (Number.isFinite(lo) && Number.isFinite(hi) && lo < hi) {
      state.window = [lo, hi];
      updateSliceView();
    }
  };
  windowLo.addEventListener("change", applyWindow);
  windowHi.addEventListener("change", applyWindow);
  showAuto.addEventListener("change", () => {
    state.showAuto = showAuto.checked;
    void enqueue(refreshContours);
  });
  showTruth.addEventListener("change", () => {
    state.showTruth = showTruth.checked;
    void enqueue(refreshContours);
  });

  const ready = enqueue(async () => {
    try {
      info = await api.volumeInfo();
      state.window = [info.intensity_range[0], info.intensity_range[1]];
      windowLo.value = String(state.window[0]);
      windowHi.value = String(state.window[1]);
      state.index = indexForAxis(info.dims, state.axis, null);
      if (!info.has_truth) {
        showTruthLabel.hidden = true;
        state.showTruth = false;
      }
      updateSliceView();
      await refreshContours();
    } catch (err) {
      setStatus(err instanceof Error ? err.message : String(err));
      throw err;
    }
  });

  return {
    ready,
    idle: () => queue.then(() => undefined, () => undefined),
    getState: () => ({
      ...state,
      params: { ...state.params },
      window: [...state.window] as [number, number],
      seed: state.seed ? ([...state.seed] as Vec3) : null,
    }),
  };
}

// browser bootstrap; absent in tests, which mount explicitly
if (typeof document !== "undefined") {
  const el = document.getElementById("app");
  if (el) createApp(el, new ApiClient(""));
}
