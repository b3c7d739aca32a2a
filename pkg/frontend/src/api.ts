/** Typed HTTP client for the segmentation service. The UI displays numbers
 *  from these responses verbatim; it does no segmentation math of its own. */

export type Axis = "x" | "y" | "z";

export interface VolumeInfo {
  dims: [number, number, number];
  spacing_mm: [number, number, number];
  origin_mm: [number, number, number];
  intensity_range: [number, number];
  has_truth: boolean;
}

export interface SegmentRequest {
  seed: [number, number, number];
  delta_r: number;
  subdiv: number;
  samples: number;
  radius_mm: number;
}

export interface PhaseMs {
  rays: number;
  graph: number;
  mincut: number;
  voxelize: number;
}

export interface SegmentResponse {
  result_id: number;
  runtime_ms: number;
  phase_ms: PhaseMs;
  volume_mm3: number;
  dsc_pct?: number;
  boundary_stats: { min: number; max: number };
}

/** One slice's contours: a list of implicitly closed loops of [x, y] points. */
export type ContourLoops = number[][][];

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Structural interface so tests can substitute a scripted fake. */
export interface Api {
  volumeInfo(): Promise<VolumeInfo>;
  sliceUrl(axis: Axis, index: number, window?: [number, number]): string;
  segment(req: SegmentRequest): Promise<SegmentResponse>;
  resultContour(id: number, axis: Axis, index: number): Promise<ContourLoops>;
  truthContour(axis: Axis, index: number): Promise<ContourLoops>;
}

export class ApiClient implements Api {
  constructor(private base: string = "") {}

  sliceUrl(axis: Axis, index: number, window?: [number, number]): string {
    const q = window ? `?window=${window[0]},${window[1]}` : "";
    return `${this.base}/api/slice/${axis}/${index}${q}`;
  }

  async volumeInfo(): Promise<VolumeInfo> {
    return this.getJson(`${this.base}/api/volume`);
  }

  async segment(req: SegmentRequest): Promise<SegmentResponse> {
    const resp = await fetch(`${this.base}/api/segment`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    return this.unwrap(resp);
  }

  async resultContour(id: number, axis: Axis, index: number): Promise<ContourLoops> {
    return this.getJson(`${this.base}/api/result/${id}/contour/${axis}/${index}`);
  }

  async truthContour(axis: Axis, index: number): Promise<ContourLoops> {
    return this.getJson(`${this.base}/api/truth/contour/${axis}/${index}`);
  }

  private async getJson<T>(url: string): Promise<T> {
    const resp = await fetch(url);
    return this.unwrap(resp);
  }

  private async unwrap<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (body && body.detail !== undefined) detail = String(body.detail);
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }
}
