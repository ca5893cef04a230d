/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_field_free: (a: number, b: number) => void;
export const __wbg_study_free: (a: number, b: number) => void;
export const advect_square_pulse: (a: number, b: number) => [number, number, number];
export const diffusion_convergence: (a: number, b: number, c: number) => [number, number, number];
export const field_error: (a: number) => number;
export const field_nx: (a: number) => number;
export const field_ny: (a: number) => number;
export const field_steps: (a: number) => number;
export const field_values: (a: number) => [number, number];
export const starfish_error_map: (a: number, b: number) => [number, number, number];
export const study_errors: (a: number) => [number, number];
export const study_n: (a: number) => [number, number];
export const study_order: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
