/* tslint:disable */
/* eslint-disable */

/**
 * Row-major nodal field with a scalar error summary.
 */
export class Field {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Max-norm error against the exact solution.
     */
    readonly error: number;
    readonly nx: number;
    readonly ny: number;
    readonly steps: number;
    readonly values: Float64Array;
}

/**
 * Errors of a forward-Euler diffusion refinement study.
 */
export class Study {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly errors: Float64Array;
    readonly n: Uint32Array;
    /**
     * Least-squares log-log slope, NaN with fewer than three levels.
     */
    readonly order: number;
}

/**
 * Square pulse advected to the final time, on the ratio grid when `optimal`.
 */
export function advect_square_pulse(n: number, optimal: boolean): Field;

/**
 * `diffusion-1d-fe` at the optimal step with or without the source correction.
 */
export function diffusion_convergence(n_min: number, levels: number, correction: boolean): Study;

/**
 * Starfish run: values are `|u - exact|` on updated nodes, `-1` for edge
 * ghosts, `-2` for corner ghosts and NaN elsewhere.
 */
export function starfish_error_map(n: number, correction: boolean): Field;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_field_free: (a: number, b: number) => void;
    readonly __wbg_study_free: (a: number, b: number) => void;
    readonly advect_square_pulse: (a: number, b: number) => [number, number, number];
    readonly diffusion_convergence: (a: number, b: number, c: number) => [number, number, number];
    readonly field_error: (a: number) => number;
    readonly field_nx: (a: number) => number;
    readonly field_ny: (a: number) => number;
    readonly field_steps: (a: number) => number;
    readonly field_values: (a: number) => [number, number];
    readonly starfish_error_map: (a: number, b: number) => [number, number, number];
    readonly study_errors: (a: number) => [number, number];
    readonly study_n: (a: number) => [number, number];
    readonly study_order: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
