#ifndef ROTVO_ROTVO_H_
#define ROTVO_ROTVO_H_

/* C interface of the rotation-only visual odometry library.
 *
 * Every function returning rotvo_status leaves a message for the calling
 * thread in rotvo_last_error() when it fails. Handles are opaque and owned by
 * the caller; destroy functions accept NULL. Strings returned through char**
 * are released with rotvo_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ROTVO_API __declspec(dllexport)
#else
#define ROTVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rotvo_status {
  ROTVO_OK = 0,
  ROTVO_ERR_INVALID_ARGUMENT = 1,
  ROTVO_ERR_INSUFFICIENT_CORRESPONDENCES = 2,
  ROTVO_ERR_NO_MODEL = 3,
  ROTVO_ERR_IO = 4,
  ROTVO_ERR_FORMAT = 5,
  ROTVO_ERR_NUMERICAL = 6,
  ROTVO_ERR_UNSUPPORTED_METRIC = 7,
  ROTVO_ERR_EMPTY_PAIR_SET = 8,
  ROTVO_ERR_INTERNAL = 9
} rotvo_status;

ROTVO_API const char* rotvo_version(void);
ROTVO_API const char* rotvo_status_name(rotvo_status status);
/* Message of the last failure on this thread; "" if none. */
ROTVO_API const char* rotvo_last_error(void);
ROTVO_API void rotvo_string_free(char* s);

/* ---- configuration ---- */

typedef struct rotvo_config rotvo_config;

ROTVO_API rotvo_status rotvo_config_create(rotvo_config** out);
ROTVO_API void rotvo_config_destroy(rotvo_config* cfg);
/* Keys as in the key=value config file, e.g. "f_window", "mode",
 * "irls.loss_scale_deg". */
ROTVO_API rotvo_status rotvo_config_set(rotvo_config* cfg, const char* key,
                                        const char* value);
/* Applies a key=value file on top of the current values. Run manifests are
 * accepted. */
ROTVO_API rotvo_status rotvo_config_load(rotvo_config* cfg, const char* path);
ROTVO_API rotvo_status rotvo_config_format(const rotvo_config* cfg,
                                           char** out);

/* ---- datasets ---- */

typedef struct rotvo_dataset rotvo_dataset;

ROTVO_API rotvo_status rotvo_dataset_open(const char* dir,
                                          rotvo_dataset** out);
ROTVO_API void rotvo_dataset_destroy(rotvo_dataset* d);
ROTVO_API int64_t rotvo_dataset_num_frames(const rotvo_dataset* d);
ROTVO_API size_t rotvo_dataset_num_pairs(const rotvo_dataset* d);
ROTVO_API size_t rotvo_dataset_num_loops(const rotvo_dataset* d);

/* ---- trajectories ---- */

typedef struct rotvo_trajectory rotvo_trajectory;

/* "id qw qx qy qz [tx ty tz]" rows or KITTI 3x4 pose rows. */
ROTVO_API rotvo_status rotvo_trajectory_read(const char* path,
                                             rotvo_trajectory** out);
ROTVO_API void rotvo_trajectory_destroy(rotvo_trajectory* t);
ROTVO_API size_t rotvo_trajectory_size(const rotvo_trajectory* t);
/* q = (w, x, y, z), camera-to-world. */
ROTVO_API rotvo_status rotvo_trajectory_get(const rotvo_trajectory* t,
                                            size_t index, int64_t* id,
                                            double q[4]);
ROTVO_API rotvo_status rotvo_trajectory_write(const rotvo_trajectory* t,
                                              const char* path);

/* ---- sequence runs ---- */

typedef struct rotvo_run rotvo_run;

typedef struct rotvo_step {
  int64_t frame_id;
  int skipped;
  int pairs_tried;
  int edges_added;
  int loops_tried;
  int loops_accepted;
  double mean_inliers;
  double relrot_us;
  double graph_us;
  double rotavg_us;
  double loop_us;
} rotvo_step;

ROTVO_API rotvo_status rotvo_run_sequence(const rotvo_dataset* d,
                                          const rotvo_config* cfg,
                                          rotvo_run** out);
ROTVO_API void rotvo_run_destroy(rotvo_run* run);
ROTVO_API size_t rotvo_run_num_steps(const rotvo_run* run);
ROTVO_API rotvo_status rotvo_run_step(const rotvo_run* run, size_t index,
                                      rotvo_step* out);
/* Copy of the final trajectory. */
ROTVO_API rotvo_status rotvo_run_trajectory(const rotvo_run* run,
                                            rotvo_trajectory** out);
/* Writes trajectory.txt, timing.csv, timing_summary.txt and manifest.txt
 * into an existing directory. `dataset_label` is recorded in the manifest as
 * the input path. */
ROTVO_API rotvo_status rotvo_run_write(const rotvo_run* run,
                                       const char* out_dir,
                                       const char* dataset_label);

/* ---- evaluation ---- */

typedef struct rotvo_metrics {
  double rpe1_deg;
  double rpen_deg;
  /* Distance-based rotation error; has_rotation_error is 0 when the ground
   * truth has no positions or no segment pair exists. */
  int has_rotation_error;
  double rotation_error_deg;
  double rotation_error_deg_per_100m;
  size_t rotation_error_pairs;
} rotvo_metrics;

ROTVO_API rotvo_status rotvo_evaluate(const rotvo_trajectory* truth,
                                      const rotvo_trajectory* estimate,
                                      rotvo_metrics* out);
/* RMSE(delta) in degrees for delta = 1 .. n - 1 over the common frames.
 * `*count` receives n - 1; at most `capacity` values are written. */
ROTVO_API rotvo_status rotvo_rpe_curve(const rotvo_trajectory* truth,
                                       const rotvo_trajectory* estimate,
                                       double* values, size_t capacity,
                                       size_t* count);

/* ---- synthetic data ---- */

typedef enum rotvo_synth_motion {
  ROTVO_MOTION_DRIVE_LOOP = 0,
  ROTVO_MOTION_PURE_ROTATION = 1,
  ROTVO_MOTION_MIXED = 2
} rotvo_synth_motion;

typedef struct rotvo_synth_spec {
  int32_t n_frames;
  rotvo_synth_motion motion;
  double step_m;
  double yaw_rate_deg;
  double wobble_deg;
  int32_t f_window;
  int32_t n_points;
  double half_fov_deg;
  double bearing_noise_deg;
  double outlier_frac;
  double rel_rot_noise_deg;
  int32_t n_outlier_edges;
  /* Adds the loop pair (0, n_frames - 1). */
  int add_closing_loop;
  uint64_t seed;
} rotvo_synth_spec;

ROTVO_API void rotvo_synth_spec_init(rotvo_synth_spec* spec);
/* matches.txt, loops.txt, truth.txt, inliers.txt. */
ROTVO_API rotvo_status rotvo_synth_write_dataset(const rotvo_synth_spec* spec,
                                                 const char* dir);
/* graph.txt, truth.txt, outlier_edges.txt. */
ROTVO_API rotvo_status rotvo_synth_write_rotgraph(
    const rotvo_synth_spec* spec, const char* dir);

#ifdef __cplusplus
}
#endif

#endif  // ROTVO_ROTVO_H_
