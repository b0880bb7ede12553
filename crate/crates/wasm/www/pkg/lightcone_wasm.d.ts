/* tslint:disable */
/* eslint-disable */

export class KernelProfile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly dx: Float64Array;
    /**
     * `|K|` on the space-like side; `NaN` inside or on the cone.
     */
    readonly magnitude: Float64Array;
}

export class Series {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly fractions: Float64Array;
    readonly times: Float64Array;
}

export class Snapshot {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly density: Float64Array;
    /**
     * Reporting floor: values below it are numerical zero.
     */
    readonly floor: number;
    /**
     * Left light-cone edge at this time.
     */
    readonly left: number;
    readonly norm: number;
    readonly right: number;
    readonly x: Float64Array;
}

export function fraction(shape: string, delta_x: number, p0: number, t_min: number, t_max: number, n: number): Series;

export function kernel(dt: number, dx_max: number, n: number, m: number): KernelProfile;

export function snapshot(shape: string, delta_x: number, p0: number, t: number, view: number): Snapshot;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_kernelprofile_free: (a: number, b: number) => void;
    readonly __wbg_series_free: (a: number, b: number) => void;
    readonly __wbg_snapshot_free: (a: number, b: number) => void;
    readonly fraction: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly kernel: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly kernelprofile_dx: (a: number) => [number, number];
    readonly kernelprofile_magnitude: (a: number) => [number, number];
    readonly series_fractions: (a: number) => [number, number];
    readonly series_times: (a: number) => [number, number];
    readonly snapshot: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly snapshot_density: (a: number) => [number, number];
    readonly snapshot_floor: (a: number) => number;
    readonly snapshot_left: (a: number) => number;
    readonly snapshot_norm: (a: number) => number;
    readonly snapshot_right: (a: number) => number;
    readonly snapshot_x: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
