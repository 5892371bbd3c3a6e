#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "relflow/tensor.hpp"

namespace relflow::ad {

// Dense double-precision matrix used for tape values and gradients. Model
// parameters stay 32-bit in their store; the tape computes in 64 bits so the
// analytic gradients themselves satisfy tight finite-difference checks.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    static Mat from(const Tensor2& t);
    Tensor2 to_f32() const;
};

struct Value {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Build a graph per step, call backward once, read leaf
// gradients, drop the tape. Single-threaded and deterministic: node order is
// creation order and every reduction runs in a fixed sequence.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Constant (non-differentiated) input.
    Value input(Mat m);
    Value input(const Tensor2& t);
    // Gradient-tracked leaf.
    Value leaf(Mat m);

    const Mat& val(Value v) const;
    const Mat& grad(Value v) const;

    Value matmul(Value a, Value b);
    Value add(Value a, Value b);
    Value add_n(std::span<const Value> vs);
    Value sub(Value a, Value b);
    Value add_row(Value x, Value row);        // broadcast 1xC over NxC
    Value broadcast_row(Value row, int rows);  // 1xC -> NxC
    Value scale(Value x, double c);
    Value mul(Value a, Value b);
    Value scale_rows(Value x, Value s);  // s is Nx1
    Value concat_cols(std::span<const Value> vs);
    Value slice_cols(Value x, int begin, int width);
    Value silu(Value x);
    Value relu(Value x);
    Value leaky_relu(Value x, double slope);
    Value layer_norm(Value x, Value gain, Value bias, double eps = 1e-5);
    Value softmax_rows(Value x);
    Value gather_rows(Value x, std::vector<int64_t> idx);
    Value segment_sum(Value x, std::vector<int64_t> seg, int64_t n_seg);
    // Softmax of an Nx1 score column within each segment; empty segments are
    // simply absent from the output's support.
    Value segment_softmax(Value scores, std::vector<int64_t> seg, int64_t n_seg);

    // Scalar (1x1) loss terms.
    // Cross entropy against integer targets, summed over rows where mask != 0.
    // Fused with the softmax for numerical stability.
    Value ce_logits_sum(Value logits, std::vector<int64_t> targets, std::vector<uint8_t> mask);
    // 0.5 * sum of squared differences over rows where mask != 0.
    Value sq_diff_sum(Value pred, Mat target, std::vector<uint8_t> mask);

    void backward(Value loss);
    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Mat value;
        Mat grad;
        bool tracked = false;
        std::function<void(Tape&)> back;
    };

    std::vector<Node> nodes_;
    bool ran_backward_ = false;

    Node& node(Value v) { return nodes_[static_cast<size_t>(v.id)]; }
    const Node& node(Value v) const { return nodes_[static_cast<size_t>(v.id)]; }
    bool tracked(Value v) const { return node(v).tracked; }
    Value push(Mat value, bool is_tracked, std::function<void(Tape&)> back);
    void check_shape(Value v, int rows, int cols, const char* op) const;
};

// C += A * B, with optional transposes on the inputs.
void mm_nn(Mat& c, const Mat& a, const Mat& b);
void mm_nt(Mat& c, const Mat& a, const Mat& b);
void mm_tn(Mat& c, const Mat& a, const Mat& b);

}  // namespace relflow::ad
