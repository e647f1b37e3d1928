/* @ts-self-types="./anneal_demo.d.ts" */

/**
 * Outcome of one anneal checked against a centered pre-estimate.
 */
export class Certification {
    static __wrap(ptr) {
        const obj = Object.create(Certification.prototype);
        obj.__wbg_ptr = ptr;
        CertificationFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CertificationFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_certification_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get e0() {
        const ret = wasm.__wbg_get_certification_e0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get e1() {
        const ret = wasm.__wbg_get_certification_e1(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get epsilon_squared() {
        const ret = wasm.__wbg_get_certification_epsilon_squared(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get error_bar() {
        const ret = wasm.__wbg_get_certification_error_bar(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get improves_preestimate() {
        const ret = wasm.__wbg_get_certification_improves_preestimate(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get mean() {
        const ret = wasm.__wbg_get_certification_mean(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get threshold() {
        const ret = wasm.__wbg_get_certification_threshold(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get variance_is_bound() {
        const ret = wasm.__wbg_get_certification_variance_is_bound(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get variance() {
        const ret = wasm.__wbg_get_certification_variance(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set e0(arg0) {
        wasm.__wbg_set_certification_e0(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set e1(arg0) {
        wasm.__wbg_set_certification_e1(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set epsilon_squared(arg0) {
        wasm.__wbg_set_certification_epsilon_squared(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set error_bar(arg0) {
        wasm.__wbg_set_certification_error_bar(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set improves_preestimate(arg0) {
        wasm.__wbg_set_certification_improves_preestimate(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set mean(arg0) {
        wasm.__wbg_set_certification_mean(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set threshold(arg0) {
        wasm.__wbg_set_certification_threshold(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set variance_is_bound(arg0) {
        wasm.__wbg_set_certification_variance_is_bound(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set variance(arg0) {
        wasm.__wbg_set_certification_variance(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Certification.prototype[Symbol.dispose] = Certification.prototype.free;

/**
 * Mean energy and error bar against annealing time at one dephasing rate.
 */
export class Curve {
    static __wrap(ptr) {
        const obj = Object.create(Curve.prototype);
        obj.__wbg_ptr = ptr;
        CurveFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CurveFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_curve_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get e0() {
        const ret = wasm.curve_e0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get e1() {
        const ret = wasm.curve_e1(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get epsilon_squared() {
        const ret = wasm.curve_epsilon_squared(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get error_bars() {
        const ret = wasm.curve_error_bars(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get means() {
        const ret = wasm.curve_means(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Index of the lowest mean (first one on ties).
     * @returns {number}
     */
    get optimal_index() {
        const ret = wasm.curve_optimal_index(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {Float64Array}
     */
    get times() {
        const ret = wasm.curve_times(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) Curve.prototype[Symbol.dispose] = Curve.prototype.free;

/**
 * Anneal curve over `points` log-spaced times in `[t_min, t_max]` ns.
 * An empty `ham` selects the bundled H2 Hamiltonian.
 * @param {string} ham
 * @param {number} gamma
 * @param {number} t_min
 * @param {number} t_max
 * @param {number} points
 * @returns {Curve}
 */
export function anneal_curve(ham, gamma, t_min, t_max, points) {
    const ptr0 = passStringToWasm0(ham, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.anneal_curve(ptr0, len0, gamma, t_min, t_max, points);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Curve.__wrap(ret[0]);
}

/**
 * Certify one `(T, γ)` anneal with `δM0 = δM1 = halfwidth` around the exact levels.
 * @param {string} ham
 * @param {number} time
 * @param {number} gamma
 * @param {number} halfwidth
 * @returns {Certification}
 */
export function certify_point(ham, time, gamma, halfwidth) {
    const ptr0 = passStringToWasm0(ham, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.certify_point(ptr0, len0, time, gamma, halfwidth);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Certification.__wrap(ret[0]);
}

/**
 * Eigenvalues, ascending.
 * @param {string} ham
 * @returns {Float64Array}
 */
export function spectrum(ham) {
    const ptr0 = passStringToWasm0(ham, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.spectrum(ptr0, len0);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v2 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v2;
}

/**
 * `[variance, error²]` of `sqrt(1-ε²)|0> + ε|1>` for levels `0` and `gap`.
 * @param {number} epsilon_squared
 * @param {number} gap
 * @returns {Float64Array}
 */
export function two_level(epsilon_squared, gap) {
    const ret = wasm.two_level(epsilon_squared, gap);
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_92b29b0548f8b746: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_344f42d3211c4765: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./anneal_demo_bg.js": import0,
    };
}

const CertificationFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_certification_free(ptr, 1));
const CurveFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_curve_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = module.ok && expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('anneal_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
