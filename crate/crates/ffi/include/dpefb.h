#ifndef DPEFB_H
#define DPEFB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpefbStatus {
  DPEFB_STATUS_OK = 0,
  DPEFB_STATUS_NULL_POINTER = 1,
  DPEFB_STATUS_INVALID_UTF8 = 2,
  DPEFB_STATUS_PARSE = 3,
  DPEFB_STATUS_INVALID_TREE = 4,
  DPEFB_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The output buffer is too small; the required length was written.
   */
  DPEFB_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * `dpefb_server_update` was called without a pending sampled strategy.
   */
  DPEFB_STATUS_NO_PENDING_STRATEGY = 7,
  DPEFB_STATUS_RUNTIME = 8,
  DPEFB_STATUS_PANIC = 9,
} DpefbStatus;

/**
 * A parsed, validated tree with its profiles.
 */
typedef struct DpefbGame DpefbGame;

/**
 * Learner state plus its sampling stream.
 */
typedef struct DpefbServer DpefbServer;

/**
 * The user side: a current environment and a private noise stream.
 */
typedef struct DpefbUser DpefbUser;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dpefb_last_error(void);

/**
 * Parses and validates a tree in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum DpefbStatus dpefb_game_parse(const char *text, struct DpefbGame **out);

/**
 * # Safety
 * `game` must come from `dpefb_game_parse` and not be freed twice.
 */
void dpefb_game_free(struct DpefbGame *game);

/**
 * Number of nodes, or 0 for NULL.
 *
 * # Safety
 * `game` must be NULL or a live handle.
 */
size_t dpefb_game_node_count(const struct DpefbGame *game);

/**
 * Number of learner actions, or 0 for NULL.
 *
 * # Safety
 * `game` must be NULL or a live handle.
 */
size_t dpefb_game_action_count(const struct DpefbGame *game);

/**
 * Number of reduced strategies. Fails with `InvalidArgument` above `u64::MAX`.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum DpefbStatus dpefb_game_strategy_count(const struct DpefbGame *game, uint64_t *out);

/**
 * Creates a learner for `horizon` trials at privacy level `epsilon` (in (0, 1)).
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable. The server keeps its
 * own reference to the game, so `game` may be freed afterwards.
 */
enum DpefbStatus dpefb_server_new(const struct DpefbGame *game,
                                  uint64_t horizon,
                                  double epsilon,
                                  uint64_t seed,
                                  struct DpefbServer **out);

/**
 * # Safety
 * `server` must come from `dpefb_server_new` and not be freed twice.
 */
void dpefb_server_free(struct DpefbServer *server);

/**
 * Samples the next reduced strategy and writes it as parallel arrays of
 * (infoset, action) in infoset-id order. The strategy stays pending until
 * `dpefb_server_update`; sampling again replaces it.
 *
 * If `capacity` is too small, `*out_len` receives the required length, the
 * pending strategy is kept, and `BufferTooSmall` is returned.
 *
 * # Safety
 * `infosets` and `actions` must each hold `capacity` elements.
 */
enum DpefbStatus dpefb_server_sample(struct DpefbServer *server,
                                     uint32_t *infosets,
                                     uint32_t *actions,
                                     size_t capacity,
                                     size_t *out_len);

/**
 * Applies a privatized report for the pending strategy. The report is given
 * as parallel arrays over exactly the actions that strategy reaches.
 *
 * # Safety
 * `actions` and `values` must each hold `len` elements.
 */
enum DpefbStatus dpefb_server_update(struct DpefbServer *server,
                                     const uint32_t *actions,
                                     const double *values,
                                     size_t len);

/**
 * Current probability of `action` at its infoset.
 *
 * # Safety
 * `server` must be a live handle; `out` must be writable.
 */
enum DpefbStatus dpefb_server_probability(const struct DpefbServer *server,
                                          uint32_t action,
                                          double *out);

/**
 * Number of completed updates, or 0 for NULL.
 *
 * # Safety
 * `server` must be NULL or a live handle.
 */
uint64_t dpefb_server_trial(const struct DpefbServer *server);

/**
 * Creates a user with its own noise stream.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum DpefbStatus dpefb_user_new(const struct DpefbGame *game,
                                double epsilon,
                                uint64_t seed,
                                struct DpefbUser **out);

/**
 * # Safety
 * `user` must come from `dpefb_user_new` and not be freed twice.
 */
void dpefb_user_free(struct DpefbUser *user);

/**
 * Sets the environment for the following trials: `next[i]` is the child
 * reached after `actions[i]`. Every action must appear exactly once.
 *
 * # Safety
 * `actions` and `next` must each hold `len` elements.
 */
enum DpefbStatus dpefb_user_set_environment(struct DpefbUser *user,
                                            const uint32_t *actions,
                                            const uint32_t *next,
                                            size_t len);

/**
 * Plays a strategy against the current environment and writes the
 * privatized report as parallel arrays over the reached actions. The true
 * loss goes to `out_loss` when it is not NULL; it is for local bookkeeping
 * and must not be sent to the server.
 *
 * If `capacity` is too small, `*out_len` receives the required length and
 * `BufferTooSmall` is returned without consuming noise.
 *
 * # Safety
 * `infosets`/`actions` must hold `len` elements; `out_actions`/`out_values`
 * must hold `capacity` elements.
 */
enum DpefbStatus dpefb_user_respond(struct DpefbUser *user,
                                    const uint32_t *infosets,
                                    const uint32_t *actions,
                                    size_t len,
                                    uint32_t *out_actions,
                                    double *out_values,
                                    size_t capacity,
                                    size_t *out_len,
                                    double *out_loss);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPEFB_H */
