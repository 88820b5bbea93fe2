// C API implementation: exception-to-status translation around the C++ core,
// with a thread-local last-error string and caller-owned handles.

#include "polarlat.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "polarlat/analysis.hpp"
#include "polarlat/codec.hpp"
#include "polarlat/commands.hpp"

struct plc_spec {
    pl::PolarLatticeSpec spec;
};

namespace {

thread_local std::string g_error;

template <class F>
plc_status guard(F&& body) {
    try {
        body();
        g_error.clear();
        return PLC_OK;
    } catch (const pl::NumericError& e) {
        g_error = e.what();
        return PLC_ENUMERIC;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return PLC_EINVAL;
    } catch (const std::runtime_error& e) {
        g_error = e.what();
        return PLC_EIO;
    } catch (const std::exception& e) {
        g_error = e.what();
        return PLC_EINVAL;
    }
}

plc_status invalid(const char* msg) {
    g_error = msg;
    return PLC_EINVAL;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void deliver(char** out, const std::string& s) {
    if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* plc_last_error(void) { return g_error.c_str(); }

void plc_spec_free(plc_spec* spec) { delete spec; }

void plc_string_free(char* s) { delete[] s; }

plc_status plc_spec_from_json(const char* text, plc_spec** out) {
    if (!text || !out) return invalid("text and out must be non-null");
    return guard([&] {
        auto handle = new plc_spec{pl::PolarLatticeSpec::from_json(text)};
        *out = handle;
    });
}

plc_status plc_spec_load(const char* path, plc_spec** out) {
    if (!path || !out) return invalid("path and out must be non-null");
    return guard([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error(std::string("cannot open spec file: ") + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        *out = new plc_spec{pl::PolarLatticeSpec::from_json(ss.str())};
    });
}

plc_status plc_spec_to_json(const plc_spec* spec, char** out) {
    if (!spec || !out) return invalid("spec and out must be non-null");
    return guard([&] { *out = dup_string(spec->spec.to_json()); });
}

plc_status plc_spec_info(const plc_spec* spec, int* n, int* r, int* N,
                         int* message_bits) {
    if (!spec) return invalid("spec must be non-null");
    return guard([&] {
        if (n) *n = spec->spec.n;
        if (r) *r = spec->spec.r;
        if (N) *N = spec->spec.N;
        if (message_bits) *message_bits = spec->spec.message_bits();
    });
}

plc_status plc_capacity_mod_lattice(int n, int r, int depth, double sigma,
                                    double* out) {
    if (!out) return invalid("out must be non-null");
    return guard([&] { *out = pl::capacity_mod_lattice({n, r}, depth, sigma); });
}

plc_status plc_capacity_partition_level(int n, int r, int ell, double sigma,
                                        double* out) {
    if (!out) return invalid("out must be non-null");
    return guard([&] { *out = pl::capacity_partition_level({n, r}, ell, sigma); });
}

plc_status plc_union_bound(const plc_spec* spec, double* out) {
    if (!spec || !out) return invalid("spec and out must be non-null");
    return guard([&] { *out = pl::union_bound_pe(spec->spec); });
}

plc_status plc_gap_report(const plc_spec* spec, double sigma_tilde, double* eps1,
                          double* eps3, double* gap_bits, double* gap_db) {
    if (!spec) return invalid("spec must be non-null");
    return guard([&] {
        const pl::GapReport g = pl::gap_report(spec->spec, sigma_tilde);
        if (eps1) *eps1 = g.eps1;
        if (eps3) *eps3 = g.eps3;
        if (gap_bits) *gap_bits = g.log_vnr_gap_bits;
        if (gap_db) *gap_db = g.gap_db;
    });
}

plc_status plc_vnr_db(const plc_spec* spec, double sigma, double* out) {
    if (!spec || !out) return invalid("spec and out must be non-null");
    return guard([&] { *out = pl::vnr_db(spec->spec, sigma); });
}

plc_status plc_encode(const plc_spec* spec, const uint8_t* message,
                      size_t message_len, double* x_out) {
    if (!spec || !x_out || (!message && message_len))
        return invalid("spec, message, and x_out must be non-null");
    return guard([&] {
        const std::vector<std::uint8_t> msg(message, message + message_len);
        const pl::Codeword cw = spec->spec.shaped
                                    ? pl::encode_shaped(spec->spec, msg)
                                    : pl::encode_construction_d(spec->spec, msg);
        std::memcpy(x_out, cw.x.data(), cw.x.size() * sizeof(double));
    });
}

plc_status plc_decode(const plc_spec* spec, const double* y, double sigma,
                      uint8_t* message_out, double* x_out) {
    if (!spec || !y || !message_out)
        return invalid("spec, y, and message_out must be non-null");
    return guard([&] {
        const pl::LatticePoint obs(y, y + static_cast<std::size_t>(spec->spec.n) *
                                              spec->spec.N);
        const double use_sigma = sigma > 0 ? sigma : spec->spec.sigma;
        const pl::DecodeResult res = pl::multistage_decode(spec->spec, obs, use_sigma);
        std::memcpy(message_out, res.message.data(), res.message.size());
        if (x_out) std::memcpy(x_out, res.x.data(), res.x.size() * sizeof(double));
    });
}

plc_status plc_cmd_construct(const char* config_path, const char* out_dir,
                             int64_t seed_override, char** summary_out) {
    if (!config_path || !out_dir) return invalid("config_path and out_dir must be non-null");
    return guard([&] {
        deliver(summary_out, pl::cmd_construct(config_path, out_dir, seed_override));
    });
}

plc_status plc_cmd_capacity(const char* config_path, const char* out_dir,
                            char** summary_out) {
    if (!config_path || !out_dir) return invalid("config_path and out_dir must be non-null");
    return guard([&] { deliver(summary_out, pl::cmd_capacity(config_path, out_dir)); });
}

plc_status plc_cmd_simulate(const char* plan_path, const char* out_dir, int threads,
                            char** summary_out) {
    if (!plan_path || !out_dir) return invalid("plan_path and out_dir must be non-null");
    return guard([&] {
        deliver(summary_out, pl::cmd_simulate(plan_path, out_dir, threads));
    });
}

plc_status plc_cmd_decode(const char* spec_path, const char* y_path, double sigma,
                          const char* out_dir, char** summary_out) {
    if (!spec_path || !y_path || !out_dir)
        return invalid("spec_path, y_path, and out_dir must be non-null");
    return guard([&] {
        deliver(summary_out, pl::cmd_decode(spec_path, y_path, sigma, out_dir));
    });
}

}  // extern "C"
