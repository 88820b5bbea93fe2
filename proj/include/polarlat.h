/*
C API for the polar lattice library: opaque spec handles, status codes, and the
command workflows behind the CLI. Every function returns a plc_status; on
failure, plc_last_error() describes the problem for the calling thread.
Strings returned through out-parameters are released with plc_string_free,
spec handles with plc_spec_free.
*/

#ifndef POLARLAT_H
#define POLARLAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plc_status {
    PLC_OK = 0,
    PLC_EINVAL = 1,  /* bad argument, config, or document */
    PLC_EIO = 2,     /* missing or unreadable file */
    PLC_ENUMERIC = 3 /* numerical soundness check failed */
} plc_status;

typedef struct plc_spec plc_spec;

/* Message for the most recent failure on this thread; "" after a success. */
const char* plc_last_error(void);

void plc_spec_free(plc_spec* spec);
void plc_string_free(char* s);

plc_status plc_spec_from_json(const char* text, plc_spec** out);
plc_status plc_spec_load(const char* path, plc_spec** out);
plc_status plc_spec_to_json(const plc_spec* spec, char** out);

/* Shape of a loaded spec; any out-pointer may be NULL. */
plc_status plc_spec_info(const plc_spec* spec, int* n, int* r, int* N,
                         int* message_bits);

/* Capacity of the mod-lattice channel at chain depth `depth`, 0 <= depth <= r. */
plc_status plc_capacity_mod_lattice(int n, int r, int depth, double sigma,
                                    double* out);
/* Capacity of the binary partition channel at level ell, 1 <= ell <= r. */
plc_status plc_capacity_partition_level(int n, int r, int ell, double sigma,
                                        double* out);

/* Union bound on the block error rate of a design at its design noise. */
plc_status plc_union_bound(const plc_spec* spec, double* out);

/* Capacity-gap accounting at noise sigma_tilde; out-pointers may be NULL. */
plc_status plc_gap_report(const plc_spec* spec, double sigma_tilde, double* eps1,
                          double* eps3, double* gap_bits, double* gap_db);

/* Volume-to-noise ratio of the design (dB, normalized) at noise sigma. */
plc_status plc_vnr_db(const plc_spec* spec, double sigma, double* out);

/* Encode message bits (exactly the spec's message_bits entries, each 0 or 1)
 * into n*N coordinates written to x_out. */
plc_status plc_encode(const plc_spec* spec, const uint8_t* message,
                      size_t message_len, double* x_out);

/* Decode n*N observed coordinates at noise sigma (<= 0 uses the design noise);
 * writes message_bits entries to message_out and, if non-NULL, the
 * reconstructed n*N coordinates to x_out. */
plc_status plc_decode(const plc_spec* spec, const double* y, double sigma,
                      uint8_t* message_out, double* x_out);

/* Command workflows. Each writes its output files under out_dir and, when
 * summary_out is non-NULL, returns the human-readable summary through it. */
plc_status plc_cmd_construct(const char* config_path, const char* out_dir,
                             int64_t seed_override, char** summary_out);
plc_status plc_cmd_capacity(const char* config_path, const char* out_dir,
                            char** summary_out);
plc_status plc_cmd_simulate(const char* plan_path, const char* out_dir, int threads,
                            char** summary_out);
plc_status plc_cmd_decode(const char* spec_path, const char* y_path, double sigma,
                          const char* out_dir, char** summary_out);

#ifdef __cplusplus
}
#endif

#endif /* POLARLAT_H */
