#include "viewrope/attention.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "viewrope/parallel.hpp"
#include "viewrope/rng.hpp"

namespace viewrope {

template <typename T>
void TokenBlockSet<T>::validate() const {
    if (num_blocks <= 0 || block_size <= 0 || heads <= 0 || head_dim <= 0) {
        throw std::invalid_argument("token block set: dims must be positive");
    }
    const size_t want = size_t(tokens()) * heads * head_dim;
    if (q.size() != want || k.size() != want || v.size() != want) {
        throw std::invalid_argument("token block set: tensor sizes do not match dims");
    }
}

template <typename T>
TokenBlockSet<T> random_block_set(int num_blocks, int block_size, int heads, int head_dim,
                                  uint64_t seed) {
    TokenBlockSet<T> s;
    s.num_blocks = num_blocks;
    s.block_size = block_size;
    s.heads = heads;
    s.head_dim = head_dim;
    const size_t n = size_t(s.tokens()) * heads * head_dim;
    s.q.resize(n);
    s.k.resize(n);
    s.v.resize(n);
    Rng rng(seed);
    for (auto& x : s.q) x = T(rng.normal());
    for (auto& x : s.k) x = T(rng.normal());
    for (auto& x : s.v) x = T(rng.normal());
    return s;
}

AttentionMask AttentionMask::block_causal(int num_blocks) {
    AttentionMask m;
    m.kind = Kind::Block;
    m.rows = m.cols = num_blocks;
    m.allow.assign(size_t(num_blocks) * num_blocks, 0);
    for (int i = 0; i < num_blocks; ++i) {
        for (int j = 0; j <= i; ++j) m.allow[size_t(i) * num_blocks + j] = 1;
    }
    return m;
}

AttentionMask AttentionMask::sliding_window(int num_blocks, int window) {
    AttentionMask m;
    m.kind = Kind::Block;
    m.rows = m.cols = num_blocks;
    m.allow.assign(size_t(num_blocks) * num_blocks, 0);
    for (int i = 0; i < num_blocks; ++i) {
        for (int j = std::max(0, i - window); j <= i; ++j) {
            m.allow[size_t(i) * num_blocks + j] = 1;
        }
    }
    return m;
}

AttentionMask AttentionMask::from_selection(const BlockSelection& sel) {
    AttentionMask m;
    m.kind = Kind::Block;
    m.rows = m.cols = sel.num_blocks;
    m.allow = sel.mask;
    return m;
}

namespace {

// Key ranges a query token may attend, expressed over token indices; block
// masks expand to whole-block spans.
template <typename T>
bool token_allowed(const TokenBlockSet<T>& blocks, const AttentionMask* mask, int q_tok,
                   int k_tok) {
    if (mask == nullptr) return true;
    if (mask->kind == AttentionMask::Kind::Token) return mask->allows(q_tok, k_tok);
    return mask->allows(q_tok / blocks.block_size, k_tok / blocks.block_size);
}

template <typename T>
void check_mask(const TokenBlockSet<T>& blocks, const AttentionMask* mask) {
    if (mask == nullptr) return;
    const int want = mask->kind == AttentionMask::Kind::Token ? blocks.tokens() : blocks.num_blocks;
    if (mask->rows != want || mask->cols != want) {
        throw std::invalid_argument("attention: mask dims do not match token set");
    }
}

}  // namespace

template <typename T>
AttentionOutput<T> dense_attention(const TokenBlockSet<T>& blocks, const AttentionMask* mask,
                                   AttentionStats* stats) {
    blocks.validate();
    check_mask(blocks, mask);
    const int L = blocks.tokens();
    const int H = blocks.heads;
    const int d = blocks.head_dim;
    const double scale = 1.0 / std::sqrt(double(d));

    AttentionOutput<T> result;
    result.out.assign(size_t(L) * H * d, T(0));
    result.flagged.assign(size_t(L), 0);
    std::vector<uint64_t> macs_per_row(size_t(L), 0);

    parallel_for(L, [&](int qt) {
        std::vector<int> keys;
        keys.reserve(size_t(L));
        for (int kt = 0; kt < L; ++kt) {
            if (token_allowed(blocks, mask, qt, kt)) keys.push_back(kt);
        }
        if (keys.empty()) {
            result.flagged[size_t(qt)] = 1;
            return;
        }
        std::vector<double> scores(keys.size());
        std::vector<double> acc(size_t(d));
        for (int h = 0; h < H; ++h) {
            const T* qv = blocks.q.data() + blocks.index(qt, h, 0);
            double max_score = -std::numeric_limits<double>::infinity();
            for (size_t n = 0; n < keys.size(); ++n) {
                const T* kv = blocks.k.data() + blocks.index(keys[n], h, 0);
                double dot = 0.0;
                for (int c = 0; c < d; ++c) dot += double(qv[c]) * double(kv[c]);
                scores[n] = dot * scale;
                max_score = std::max(max_score, scores[n]);
            }
            double denom = 0.0;
            for (double& s : scores) {
                s = std::exp(s - max_score);
                denom += s;
            }
            std::fill(acc.begin(), acc.end(), 0.0);
            for (size_t n = 0; n < keys.size(); ++n) {
                const double w = scores[n] / denom;
                const T* vv = blocks.v.data() + blocks.index(keys[n], h, 0);
                for (int c = 0; c < d; ++c) acc[size_t(c)] += w * double(vv[c]);
            }
            T* ov = result.out.data() + blocks.index(qt, h, 0);
            for (int c = 0; c < d; ++c) ov[c] = T(acc[size_t(c)]);
            macs_per_row[size_t(qt)] += uint64_t(keys.size()) * uint64_t(d) * 2u;
        }
    });
    if (stats != nullptr) {
        for (uint64_t m : macs_per_row) stats->macs += m;
    }
    return result;
}

template <typename T>
std::vector<T> dense_cross_attention(const std::vector<T>& q, const std::vector<T>& k,
                                     const std::vector<T>& v, int q_tokens, int kv_tokens,
                                     int heads, int head_dim, AttentionStats* stats) {
    if (q.size() != size_t(q_tokens) * heads * head_dim ||
        k.size() != size_t(kv_tokens) * heads * head_dim || v.size() != k.size()) {
        throw std::invalid_argument("cross attention: tensor sizes do not match dims");
    }
    const double scale = 1.0 / std::sqrt(double(head_dim));
    std::vector<T> out(size_t(q_tokens) * heads * head_dim, T(0));
    std::vector<double> scores(size_t(kv_tokens));
    std::vector<double> acc(size_t(head_dim));
    for (int qt = 0; qt < q_tokens; ++qt) {
        for (int h = 0; h < heads; ++h) {
            const T* qv = q.data() + (size_t(qt) * heads + h) * head_dim;
            double max_score = -std::numeric_limits<double>::infinity();
            for (int kt = 0; kt < kv_tokens; ++kt) {
                const T* kv = k.data() + (size_t(kt) * heads + h) * head_dim;
                double dot = 0.0;
                for (int c = 0; c < head_dim; ++c) dot += double(qv[c]) * double(kv[c]);
                scores[size_t(kt)] = dot * scale;
                max_score = std::max(max_score, scores[size_t(kt)]);
            }
            double denom = 0.0;
            for (int kt = 0; kt < kv_tokens; ++kt) {
                scores[size_t(kt)] = std::exp(scores[size_t(kt)] - max_score);
                denom += scores[size_t(kt)];
            }
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int kt = 0; kt < kv_tokens; ++kt) {
                const double w = scores[size_t(kt)] / denom;
                const T* vv = v.data() + (size_t(kt) * heads + h) * head_dim;
                for (int c = 0; c < head_dim; ++c) acc[size_t(c)] += w * double(vv[c]);
            }
            T* ov = out.data() + (size_t(qt) * heads + h) * head_dim;
            for (int c = 0; c < head_dim; ++c) ov[c] = T(acc[size_t(c)]);
            if (stats != nullptr) stats->macs += uint64_t(kv_tokens) * uint64_t(head_dim) * 2u;
        }
    }
    return out;
}

template <typename T>
BlockAffinity estimate_block_affinity_raw(const TokenBlockSet<T>& blocks, int sample_count,
                                          uint64_t rng_seed) {
    blocks.validate();
    if (sample_count < 1 || sample_count > blocks.block_size) {
        throw std::invalid_argument("block affinity: sample count must be in [1, block_size]");
    }
    const int N = blocks.num_blocks;
    const int H = blocks.heads;
    const int d = blocks.head_dim;
    const double norm = 1.0 / (double(H) * double(sample_count));
    const double scale = 1.0 / std::sqrt(double(d));

    Rng rng(rng_seed);
    BlockAffinity aff;
    aff.num_blocks = N;
    aff.sample_count = sample_count;
    aff.sample_indices = rng.sample_without_replacement(blocks.block_size, sample_count);
    aff.scores.assign(size_t(N) * N, 0.0);

    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double sum = 0.0;
            for (int h = 0; h < H; ++h) {
                for (int s : aff.sample_indices) {
                    const T* qv = blocks.q.data() + blocks.index(i * blocks.block_size + s, h, 0);
                    const T* kv = blocks.k.data() + blocks.index(j * blocks.block_size + s, h, 0);
                    double dot = 0.0;
                    for (int c = 0; c < d; ++c) dot += double(qv[c]) * double(kv[c]);
                    sum += dot * scale;
                }
            }
            aff.at(i, j) = sum * norm;
        }
    }
    return aff;
}

template <typename T>
BlockAffinity estimate_block_affinity(const TokenBlockSet<T>& blocks, int sample_count,
                                      uint64_t rng_seed) {
    return apply_causal_block_mask(estimate_block_affinity_raw(blocks, sample_count, rng_seed));
}

BlockAffinity apply_causal_block_mask(BlockAffinity affinity) {
    const int n = affinity.num_blocks;
    if (int(affinity.scores.size()) != n * n) {
        throw std::invalid_argument("causal mask: affinity matrix must be square");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) affinity.at(i, j) = BlockAffinity::masked();
    }
    return affinity;
}

BlockAffinity apply_validity_mask(BlockAffinity affinity, const std::vector<uint8_t>& allowed) {
    const int n = affinity.num_blocks;
    if (int(allowed.size()) != n * n) {
        throw std::invalid_argument("validity mask: size mismatch");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!allowed[size_t(i) * n + j]) affinity.at(i, j) = BlockAffinity::masked();
        }
    }
    return affinity;
}

std::vector<int> topk_row(const double* scores, int count, int self_index, int k) {
    std::vector<int> candidates;
    candidates.reserve(size_t(count));
    for (int j = 0; j < count; ++j) {
        if (j == self_index) continue;
        if (std::isfinite(scores[j])) candidates.push_back(j);
    }
    const int take = std::min<int>(k, int(candidates.size()));
    // ties prefer the more recent block (larger j)
    std::partial_sort(candidates.begin(), candidates.begin() + take, candidates.end(),
                      [&](int a, int b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a > b;
                      });
    candidates.resize(size_t(take));
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

BlockSelection topk_select(const BlockAffinity& affinity, int k) {
    if (k < 0) throw std::invalid_argument("topk_select: k must be non-negative");
    const int n = affinity.num_blocks;
    BlockSelection sel;
    sel.num_blocks = n;
    sel.k = k;
    sel.topk_sets.resize(size_t(n));
    sel.mask.assign(size_t(n) * n, 0);
    sel.valid.assign(size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        const double* row = affinity.scores.data() + size_t(i) * n;
        for (int j = 0; j < n; ++j) {
            if (std::isfinite(row[j])) sel.valid[size_t(i) * n + j] = 1;
        }
        sel.topk_sets[size_t(i)] = topk_row(row, n, i, k);
        for (int j : sel.topk_sets[size_t(i)]) sel.mask[size_t(i) * n + j] = 1;
        sel.mask[size_t(i) * n + i] = 1;  // always include j = i
    }
    return sel;
}

BlockSelection counterfactual_mask(const BlockSelection& selection, CounterfactualStrategy strategy,
                                   int k, uint64_t rng_seed) {
    const int n = selection.num_blocks;
    BlockSelection out;
    out.num_blocks = n;
    out.k = k;
    out.topk_sets.resize(size_t(n));
    out.mask.assign(size_t(n) * n, 0);
    out.valid = selection.valid;
    for (int i = 0; i < n; ++i) {
        std::vector<int> pool;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (!selection.valid[size_t(i) * n + j]) continue;
            if (strategy == CounterfactualStrategy::ExcludeSelected) {
                const auto& chosen = selection.topk_sets[size_t(i)];
                if (std::binary_search(chosen.begin(), chosen.end(), j)) continue;
            }
            pool.push_back(j);
        }
        const int take = std::min<int>(k, int(pool.size()));
        Rng rng(derive_seed(rng_seed, uint64_t(i)));
        std::vector<int> picked;
        if (take > 0) {
            const std::vector<int> subset = rng.sample_without_replacement(int(pool.size()), take);
            picked.reserve(size_t(take));
            for (int idx : subset) picked.push_back(pool[size_t(idx)]);
        }
        std::sort(picked.begin(), picked.end());
        out.topk_sets[size_t(i)] = picked;
        for (int j : picked) out.mask[size_t(i) * n + j] = 1;
        out.mask[size_t(i) * n + i] = 1;  // self block always retained
    }
    return out;
}

template <typename T>
AttentionOutput<T> sparse_attention(const TokenBlockSet<T>& blocks, const BlockSelection& selection,
                                    AttentionStats* stats) {
    blocks.validate();
    if (selection.num_blocks != blocks.num_blocks) {
        throw std::invalid_argument("sparse attention: selection does not match block count");
    }
    const int B = blocks.block_size;
    const int H = blocks.heads;
    const int d = blocks.head_dim;
    const double scale = 1.0 / std::sqrt(double(d));

    AttentionOutput<T> result;
    result.out.assign(size_t(blocks.tokens()) * H * d, T(0));
    result.flagged.assign(size_t(blocks.tokens()), 0);
    std::vector<uint64_t> macs_per_block(size_t(blocks.num_blocks), 0);

    parallel_for(blocks.num_blocks, [&](int i) {
        std::vector<int> key_blocks;
        for (int j = 0; j < blocks.num_blocks; ++j) {
            if (selection.selected(i, j)) key_blocks.push_back(j);
        }
        const int kv_count = int(key_blocks.size()) * B;
        std::vector<double> scores(size_t(kv_count));
        std::vector<double> acc(size_t(d));
        for (int bq = 0; bq < B; ++bq) {
            const int qt = i * B + bq;
            for (int h = 0; h < H; ++h) {
                const T* qv = blocks.q.data() + blocks.index(qt, h, 0);
                double max_score = -std::numeric_limits<double>::infinity();
                int n = 0;
                for (int j : key_blocks) {
                    for (int bk = 0; bk < B; ++bk, ++n) {
                        const T* kv = blocks.k.data() + blocks.index(j * B + bk, h, 0);
                        double dot = 0.0;
                        for (int c = 0; c < d; ++c) dot += double(qv[c]) * double(kv[c]);
                        scores[size_t(n)] = dot * scale;
                        max_score = std::max(max_score, scores[size_t(n)]);
                    }
                }
                double denom = 0.0;
                for (int m = 0; m < kv_count; ++m) {
                    scores[size_t(m)] = std::exp(scores[size_t(m)] - max_score);
                    denom += scores[size_t(m)];
                }
                std::fill(acc.begin(), acc.end(), 0.0);
                n = 0;
                for (int j : key_blocks) {
                    for (int bk = 0; bk < B; ++bk, ++n) {
                        const double w = scores[size_t(n)] / denom;
                        const T* vv = blocks.v.data() + blocks.index(j * B + bk, h, 0);
                        for (int c = 0; c < d; ++c) acc[size_t(c)] += w * double(vv[c]);
                    }
                }
                T* ov = result.out.data() + blocks.index(qt, h, 0);
                for (int c = 0; c < d; ++c) ov[c] = T(acc[size_t(c)]);
                macs_per_block[size_t(i)] += uint64_t(kv_count) * uint64_t(d) * 2u;
            }
        }
    });
    if (stats != nullptr) {
        for (uint64_t m : macs_per_block) stats->macs += m;
    }
    return result;
}

template <typename T>
AttentionGrads<T> attention_backward(const TokenBlockSet<T>& blocks, const AttentionMask* mask,
                                     const std::vector<T>& upstream) {
    blocks.validate();
    check_mask(blocks, mask);
    if (upstream.size() != blocks.q.size()) {
        throw std::invalid_argument("attention backward: upstream gradient size mismatch");
    }
    const int L = blocks.tokens();
    const int H = blocks.heads;
    const int d = blocks.head_dim;
    const double scale = 1.0 / std::sqrt(double(d));

    AttentionGrads<T> grads;
    grads.dq.assign(blocks.q.size(), T(0));
    grads.dk.assign(blocks.k.size(), T(0));
    grads.dv.assign(blocks.v.size(), T(0));

    std::vector<int> keys;
    std::vector<double> prob, dprob;
    for (int qt = 0; qt < L; ++qt) {
        keys.clear();
        for (int kt = 0; kt < L; ++kt) {
            if (token_allowed(blocks, mask, qt, kt)) keys.push_back(kt);
        }
        if (keys.empty()) continue;  // flagged row: zero gradient
        prob.resize(keys.size());
        dprob.resize(keys.size());
        for (int h = 0; h < H; ++h) {
            const T* qv = blocks.q.data() + blocks.index(qt, h, 0);
            const T* dov = upstream.data() + blocks.index(qt, h, 0);
            double max_score = -std::numeric_limits<double>::infinity();
            for (size_t n = 0; n < keys.size(); ++n) {
                const T* kv = blocks.k.data() + blocks.index(keys[n], h, 0);
                double dot = 0.0;
                for (int c = 0; c < d; ++c) dot += double(qv[c]) * double(kv[c]);
                prob[n] = dot * scale;
                max_score = std::max(max_score, prob[n]);
            }
            double denom = 0.0;
            for (double& s : prob) {
                s = std::exp(s - max_score);
                denom += s;
            }
            for (double& s : prob) s /= denom;

            // dv_j += p_j dO ; dp_j = dO . v_j
            double inner = 0.0;  // sum_j p_j dp_j
            for (size_t n = 0; n < keys.size(); ++n) {
                const T* vv = blocks.v.data() + blocks.index(keys[n], h, 0);
                T* dvv = grads.dv.data() + blocks.index(keys[n], h, 0);
                double dp = 0.0;
                for (int c = 0; c < d; ++c) {
                    dp += double(dov[c]) * double(vv[c]);
                    dvv[c] = T(double(dvv[c]) + prob[n] * double(dov[c]));
                }
                dprob[n] = dp;
                inner += prob[n] * dp;
            }
            // ds_j = p_j (dp_j - inner); dq += ds_j k_j * scale; dk_j += ds_j q * scale
            T* dqv = grads.dq.data() + blocks.index(qt, h, 0);
            for (size_t n = 0; n < keys.size(); ++n) {
                const double dscore = prob[n] * (dprob[n] - inner) * scale;
                const T* kv = blocks.k.data() + blocks.index(keys[n], h, 0);
                T* dkv = grads.dk.data() + blocks.index(keys[n], h, 0);
                for (int c = 0; c < d; ++c) {
                    dqv[c] = T(double(dqv[c]) + dscore * double(kv[c]));
                    dkv[c] = T(double(dkv[c]) + dscore * double(qv[c]));
                }
            }
        }
    }
    return grads;
}

void export_affinity_heatmap(const BlockAffinity& affinity, const BlockSelection& selection,
                             std::ostream& out) {
    const int n = affinity.num_blocks;
    if (selection.num_blocks != n) {
        throw std::invalid_argument("heatmap export: selection does not match affinity");
    }
    out << "i,j,weight,selected\n";
    std::vector<double> weights(size_t(n));
    char buf[64];
    for (int i = 0; i < n; ++i) {
        double max_score = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (std::isfinite(affinity.at(i, j))) max_score = std::max(max_score, affinity.at(i, j));
        }
        double denom = 0.0;
        for (int j = 0; j < n; ++j) {
            if (std::isfinite(affinity.at(i, j))) {
                weights[size_t(j)] = std::exp(affinity.at(i, j) - max_score);
                denom += weights[size_t(j)];
            } else {
                weights[size_t(j)] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        for (int j = 0; j < n; ++j) {
            out << i << ',' << j << ',';
            if (std::isfinite(weights[size_t(j)])) {
                std::snprintf(buf, sizeof(buf), "%.17g", weights[size_t(j)] / denom);
                out << buf;
            }
            out << ',' << (selection.selected(i, j) ? 1 : 0) << '\n';
        }
    }
    if (!out) throw std::runtime_error("heatmap export: write failed");
}

HeatmapTable parse_affinity_heatmap(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "i,j,weight,selected") {
        throw std::runtime_error("heatmap parse: missing header row");
    }
    struct Cell {
        int i, j;
        double w;
        uint8_t sel;
    };
    std::vector<Cell> cells;
    int max_index = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f0, f1, f2, f3;
        if (!std::getline(ls, f0, ',') || !std::getline(ls, f1, ',') ||
            !std::getline(ls, f2, ',') || !std::getline(ls, f3)) {
            throw std::runtime_error("heatmap parse: malformed row at line " +
                                     std::to_string(line_no));
        }
        Cell c;
        c.i = std::stoi(f0);
        c.j = std::stoi(f1);
        c.w = f2.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(f2);
        c.sel = uint8_t(std::stoi(f3));
        cells.push_back(c);
        max_index = std::max({max_index, c.i, c.j});
    }
    HeatmapTable table;
    table.num_blocks = max_index + 1;
    const size_t total = size_t(table.num_blocks) * table.num_blocks;
    if (cells.size() != total) {
        throw std::runtime_error("heatmap parse: expected a full matrix");
    }
    table.weights.assign(total, std::numeric_limits<double>::quiet_NaN());
    table.selected.assign(total, 0);
    for (const Cell& c : cells) {
        table.weights[size_t(c.i) * table.num_blocks + c.j] = c.w;
        table.selected[size_t(c.i) * table.num_blocks + c.j] = c.sel;
    }
    return table;
}

uint64_t sparse_attention_analytic_macs(int num_blocks, int block_size, int heads, int head_dim,
                                        int k) {
    uint64_t selected_blocks = 0;
    for (int i = 0; i < num_blocks; ++i) selected_blocks += uint64_t(std::min(i, k)) + 1u;
    return selected_blocks * uint64_t(block_size) * uint64_t(block_size) * uint64_t(heads) *
           uint64_t(head_dim) * 2u;
}

uint64_t dense_causal_analytic_macs(int num_blocks, int block_size, int heads, int head_dim) {
    uint64_t pairs = 0;
    for (int i = 0; i < num_blocks; ++i) pairs += uint64_t(i) + 1u;
    return pairs * uint64_t(block_size) * uint64_t(block_size) * uint64_t(heads) *
           uint64_t(head_dim) * 2u;
}

#define VIEWROPE_ATTN_INSTANTIATE(T)                                                               \
    template struct TokenBlockSet<T>;                                                              \
    template TokenBlockSet<T> random_block_set<T>(int, int, int, int, uint64_t);                   \
    template AttentionOutput<T> dense_attention<T>(const TokenBlockSet<T>&, const AttentionMask*,  \
                                                   AttentionStats*);                               \
    template std::vector<T> dense_cross_attention<T>(const std::vector<T>&, const std::vector<T>&, \
                                                     const std::vector<T>&, int, int, int, int,    \
                                                     AttentionStats*);                             \
    template BlockAffinity estimate_block_affinity_raw<T>(const TokenBlockSet<T>&, int, uint64_t); \
    template BlockAffinity estimate_block_affinity<T>(const TokenBlockSet<T>&, int, uint64_t);     \
    template AttentionOutput<T> sparse_attention<T>(const TokenBlockSet<T>&,                       \
                                                    const BlockSelection&, AttentionStats*);       \
    template AttentionGrads<T> attention_backward<T>(const TokenBlockSet<T>&,                      \
                                                     const AttentionMask*, const std::vector<T>&);

VIEWROPE_ATTN_INSTANTIATE(float)
VIEWROPE_ATTN_INSTANTIATE(double)

#undef VIEWROPE_ATTN_INSTANTIATE

} // namespace viewrope
