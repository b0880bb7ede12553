/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_kernelprofile_free: (a: number, b: number) => void;
export const __wbg_series_free: (a: number, b: number) => void;
export const __wbg_snapshot_free: (a: number, b: number) => void;
export const fraction: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const kernel: (a: number, b: number, c: number, d: number) => [number, number, number];
export const kernelprofile_dx: (a: number) => [number, number];
export const kernelprofile_magnitude: (a: number) => [number, number];
export const series_fractions: (a: number) => [number, number];
export const series_times: (a: number) => [number, number];
export const snapshot: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const snapshot_density: (a: number) => [number, number];
export const snapshot_floor: (a: number) => number;
export const snapshot_left: (a: number) => number;
export const snapshot_norm: (a: number) => number;
export const snapshot_right: (a: number) => number;
export const snapshot_x: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
