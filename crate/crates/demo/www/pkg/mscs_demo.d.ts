/* tslint:disable */
/* eslint-disable */

export class DemoHandle {
    free(): void;
    [Symbol.dispose](): void;
    edgeCount(): number;
    histograms(measure: string, strategy: string, size: number, seed: bigint): Float64Array;
    constructor(n: number, m: number, rho: number, seed: bigint);
    nmBins(k: number, target_size: number, seed: bigint): Float64Array;
    nodeCount(): number;
    trajectory(strategy: string, target_size: number, rate: number, max_fraction: number, seed: bigint): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demohandle_free: (a: number, b: number) => void;
    readonly demohandle_edgeCount: (a: number) => number;
    readonly demohandle_histograms: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly demohandle_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly demohandle_nmBins: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly demohandle_nodeCount: (a: number) => number;
    readonly demohandle_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
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
