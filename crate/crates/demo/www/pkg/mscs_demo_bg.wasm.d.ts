/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demohandle_free: (a: number, b: number) => void;
export const demohandle_edgeCount: (a: number) => number;
export const demohandle_histograms: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
export const demohandle_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const demohandle_nmBins: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
export const demohandle_nodeCount: (a: number) => number;
export const demohandle_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
