#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace viewrope {

/// Q/K/V token tensors partitioned into frame-aligned blocks: layout
/// [num_blocks * block_size, heads, head_dim], row-major. The block size is
/// the token count of one latent frame.
template <typename T>
struct TokenBlockSet {
    int num_blocks = 0;  // N
    int block_size = 0;  // B
    int heads = 0;       // H
    int head_dim = 0;    // d
    std::vector<T> q, k, v;

    int tokens() const { return num_blocks * block_size; }
    size_t index(int token, int head, int channel) const {
        return (size_t(token) * heads + head) * head_dim + channel;
    }
    void validate() const;
};

/// Random Q/K/V drawn i.i.d. standard normal under a fixed seed.
template <typename T>
TokenBlockSet<T> random_block_set(int num_blocks, int block_size, int heads, int head_dim,
                                  uint64_t seed);

/// Head-averaged block affinity estimate. Entries at masked positions hold
/// -infinity; the sentinel is filtered out before any softmax.
struct BlockAffinity {
    int num_blocks = 0;
    std::vector<double> scores;  // [N * N]
    int sample_count = 0;
    std::vector<int> sample_indices;  // shared index set, ascending

    double& at(int i, int j) { return scores[size_t(i) * num_blocks + j]; }
    double at(int i, int j) const { return scores[size_t(i) * num_blocks + j]; }
    static constexpr double masked() { return -std::numeric_limits<double>::infinity(); }
};

/// Per-query-block top-k key sets and the resulting binary mask.
/// valid keeps the pre-selection candidate positions (finite affinity
/// entries) so counterfactual strategies know each row's admissible blocks.
struct BlockSelection {
    int num_blocks = 0;
    int k = 0;
    std::vector<std::vector<int>> topk_sets;  // ascending within each row
    std::vector<uint8_t> mask;                // [N * N]
    std::vector<uint8_t> valid;               // [N * N]

    bool selected(int i, int j) const { return mask[size_t(i) * num_blocks + j] != 0; }
};

/// Attention mask at block or token granularity. allow[i * cols + j] != 0
/// means query i (block or token) may attend key j.
struct AttentionMask {
    enum class Kind { Block, Token };
    Kind kind = Kind::Block;
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> allow;

    static AttentionMask block_causal(int num_blocks);
    /// Window of the w most recent blocks plus self: j in [i - w, i].
    static AttentionMask sliding_window(int num_blocks, int window);
    static AttentionMask from_selection(const BlockSelection& sel);

    bool allows(int i, int j) const { return allow[size_t(i) * cols + j] != 0; }
};

/// Multiply-accumulate counter for the score and output contractions.
struct AttentionStats {
    uint64_t macs = 0;
};

template <typename T>
struct AttentionOutput {
    std::vector<T> out;              // [tokens, heads, head_dim]
    std::vector<uint8_t> flagged;    // query tokens whose key set was empty
};

template <typename T>
struct AttentionGrads {
    std::vector<T> dq, dk, dv;
};

/// Reference attention: softmax(Q K^T / sqrt(d)) V per head with max-
/// subtraction, masked positions excluded. A fully masked query row yields a
/// zero output vector and a flag.
template <typename T>
AttentionOutput<T> dense_attention(const TokenBlockSet<T>& blocks,
                                   const AttentionMask* mask = nullptr,
                                   AttentionStats* stats = nullptr);

/// Full (unmasked) attention of q over a separate key/value set; used for
/// streaming where the key set is gathered from a cache.
template <typename T>
std::vector<T> dense_cross_attention(const std::vector<T>& q, const std::vector<T>& k,
                                     const std::vector<T>& v, int q_tokens, int kv_tokens,
                                     int heads, int head_dim, AttentionStats* stats = nullptr);

/// S~_ij = 1/(H*Ks) sum_h sum_s q_{i,s}^(h) . k_{j,s}^(h) / sqrt(d) over one
/// shared index set S of size sample_count drawn uniformly without
/// replacement from [0, B). No mask applied.
template <typename T>
BlockAffinity estimate_block_affinity_raw(const TokenBlockSet<T>& blocks, int sample_count,
                                          uint64_t rng_seed);

/// Same estimate with the streaming causal constraint applied (j > i masked).
template <typename T>
BlockAffinity estimate_block_affinity(const TokenBlockSet<T>& blocks, int sample_count,
                                      uint64_t rng_seed);

/// Masks the strict upper triangle (j > i) with -infinity. Idempotent.
BlockAffinity apply_causal_block_mask(BlockAffinity affinity);

/// Masks every position where allowed[i * N + j] == 0.
BlockAffinity apply_validity_mask(BlockAffinity affinity, const std::vector<uint8_t>& allowed);

/// Top-k over one affinity row: the k largest finite entries excluding
/// self_index, ties broken toward larger j. Returned ascending.
std::vector<int> topk_row(const double* scores, int count, int self_index, int k);

/// Per row i: the k best valid past blocks by affinity plus the always-
/// included self block. Masked (infinite) entries are never selected.
BlockSelection topk_select(const BlockAffinity& affinity, int k);

enum class CounterfactualStrategy { RandomSelection, ExcludeSelected };

/// Replaces each row's selected set: RandomSelection draws k blocks uniformly
/// from the row's valid past; ExcludeSelected draws from the valid past minus
/// the originally selected set (fewer when not enough remain). The self block
/// is always retained.
BlockSelection counterfactual_mask(const BlockSelection& selection, CounterfactualStrategy strategy,
                                   int k, uint64_t rng_seed);

/// Attention restricted to each query block's selected key blocks. Agrees
/// with dense_attention under the same mask.
template <typename T>
AttentionOutput<T> sparse_attention(const TokenBlockSet<T>& blocks, const BlockSelection& selection,
                                    AttentionStats* stats = nullptr);

/// Analytic reverse-mode gradients of masked attention with respect to Q, K
/// and V. Masked positions receive zero gradient.
template <typename T>
AttentionGrads<T> attention_backward(const TokenBlockSet<T>& blocks, const AttentionMask* mask,
                                     const std::vector<T>& upstream);

/// CSV dump `i,j,weight,selected` of the row-normalized affinity (softmax
/// over the finite entries) and the selection mask. Masked cells are empty.
void export_affinity_heatmap(const BlockAffinity& affinity, const BlockSelection& selection,
                             std::ostream& out);

struct HeatmapTable {
    int num_blocks = 0;
    std::vector<double> weights;     // NaN where the cell was empty
    std::vector<uint8_t> selected;
};

/// Parses a CSV produced by export_affinity_heatmap.
HeatmapTable parse_affinity_heatmap(std::istream& in);

/// Exact MAC count of sparse attention with the given block budget, for
/// checking the counters against the closed form.
uint64_t sparse_attention_analytic_macs(int num_blocks, int block_size, int heads, int head_dim,
                                        int k);
uint64_t dense_causal_analytic_macs(int num_blocks, int block_size, int heads, int head_dim);

} // namespace viewrope
