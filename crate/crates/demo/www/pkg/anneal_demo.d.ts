/* tslint:disable */
/* eslint-disable */

/**
 * Outcome of one anneal checked against a centered pre-estimate.
 */
export class Certification {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    e0: number;
    e1: number;
    epsilon_squared: number;
    error_bar: number;
    improves_preestimate: boolean;
    mean: number;
    threshold: number;
    variance_is_bound: boolean;
    variance: number;
}

/**
 * Mean energy and error bar against annealing time at one dephasing rate.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly e0: number;
    readonly e1: number;
    readonly epsilon_squared: Float64Array;
    readonly error_bars: Float64Array;
    readonly means: Float64Array;
    /**
     * Index of the lowest mean (first one on ties).
     */
    readonly optimal_index: number;
    readonly times: Float64Array;
}

/**
 * Anneal curve over `points` log-spaced times in `[t_min, t_max]` ns.
 * An empty `ham` selects the bundled H2 Hamiltonian.
 */
export function anneal_curve(ham: string, gamma: number, t_min: number, t_max: number, points: number): Curve;

/**
 * Certify one `(T, γ)` anneal with `δM0 = δM1 = halfwidth` around the exact levels.
 */
export function certify_point(ham: string, time: number, gamma: number, halfwidth: number): Certification;

/**
 * Eigenvalues, ascending.
 */
export function spectrum(ham: string): Float64Array;

/**
 * `[variance, error²]` of `sqrt(1-ε²)|0> + ε|1>` for levels `0` and `gap`.
 */
export function two_level(epsilon_squared: number, gap: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_certification_free: (a: number, b: number) => void;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_get_certification_e0: (a: number) => number;
    readonly __wbg_get_certification_e1: (a: number) => number;
    readonly __wbg_get_certification_epsilon_squared: (a: number) => number;
    readonly __wbg_get_certification_error_bar: (a: number) => number;
    readonly __wbg_get_certification_improves_preestimate: (a: number) => number;
    readonly __wbg_get_certification_mean: (a: number) => number;
    readonly __wbg_get_certification_threshold: (a: number) => number;
    readonly __wbg_get_certification_variance: (a: number) => number;
    readonly __wbg_get_certification_variance_is_bound: (a: number) => number;
    readonly __wbg_set_certification_e0: (a: number, b: number) => void;
    readonly __wbg_set_certification_e1: (a: number, b: number) => void;
    readonly __wbg_set_certification_epsilon_squared: (a: number, b: number) => void;
    readonly __wbg_set_certification_error_bar: (a: number, b: number) => void;
    readonly __wbg_set_certification_improves_preestimate: (a: number, b: number) => void;
    readonly __wbg_set_certification_mean: (a: number, b: number) => void;
    readonly __wbg_set_certification_threshold: (a: number, b: number) => void;
    readonly __wbg_set_certification_variance: (a: number, b: number) => void;
    readonly __wbg_set_certification_variance_is_bound: (a: number, b: number) => void;
    readonly anneal_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly certify_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly curve_e0: (a: number) => number;
    readonly curve_e1: (a: number) => number;
    readonly curve_epsilon_squared: (a: number) => [number, number];
    readonly curve_error_bars: (a: number) => [number, number];
    readonly curve_means: (a: number) => [number, number];
    readonly curve_optimal_index: (a: number) => number;
    readonly curve_times: (a: number) => [number, number];
    readonly spectrum: (a: number, b: number) => [number, number, number, number];
    readonly two_level: (a: number, b: number) => [number, number];
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
