/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_certification_free: (a: number, b: number) => void;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_get_certification_e0: (a: number) => number;
export const __wbg_get_certification_e1: (a: number) => number;
export const __wbg_get_certification_epsilon_squared: (a: number) => number;
export const __wbg_get_certification_error_bar: (a: number) => number;
export const __wbg_get_certification_improves_preestimate: (a: number) => number;
export const __wbg_get_certification_mean: (a: number) => number;
export const __wbg_get_certification_threshold: (a: number) => number;
export const __wbg_get_certification_variance: (a: number) => number;
export const __wbg_get_certification_variance_is_bound: (a: number) => number;
export const __wbg_set_certification_e0: (a: number, b: number) => void;
export const __wbg_set_certification_e1: (a: number, b: number) => void;
export const __wbg_set_certification_epsilon_squared: (a: number, b: number) => void;
export const __wbg_set_certification_error_bar: (a: number, b: number) => void;
export const __wbg_set_certification_improves_preestimate: (a: number, b: number) => void;
export const __wbg_set_certification_mean: (a: number, b: number) => void;
export const __wbg_set_certification_threshold: (a: number, b: number) => void;
export const __wbg_set_certification_variance: (a: number, b: number) => void;
export const __wbg_set_certification_variance_is_bound: (a: number, b: number) => void;
export const anneal_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const certify_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const curve_e0: (a: number) => number;
export const curve_e1: (a: number) => number;
export const curve_epsilon_squared: (a: number) => [number, number];
export const curve_error_bars: (a: number) => [number, number];
export const curve_means: (a: number) => [number, number];
export const curve_optimal_index: (a: number) => number;
export const curve_times: (a: number) => [number, number];
export const spectrum: (a: number, b: number) => [number, number, number, number];
export const two_level: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
