#include "relflow/autodiff.hpp"

#include <cmath>
#include <limits>

#include "relflow/common.hpp"

namespace relflow::ad {

Mat Mat::from(const Tensor2& t) {
    Mat m(t.rows, t.cols);
    for (size_t i = 0; i < t.v.size(); ++i) m.v[i] = static_cast<double>(t.v[i]);
    return m;
}

Tensor2 Mat::to_f32() const {
    Tensor2 t(rows, cols);
    for (size_t i = 0; i < v.size(); ++i) t.v[i] = static_cast<float>(v[i]);
    return t;
}

void mm_nn(Mat& c, const Mat& a, const Mat& b) {
    for (int i = 0; i < a.rows; ++i) {
        const double* ar = &a.v[static_cast<size_t>(i) * a.cols];
        double* cr = &c.v[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double av = ar[k];
            if (av == 0.0) continue;
            const double* br = &b.v[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) cr[j] += av * br[j];
        }
    }
}

void mm_nt(Mat& c, const Mat& a, const Mat& b) {
    // c(i,j) += sum_k a(i,k) * b(j,k)
    for (int i = 0; i < a.rows; ++i) {
        const double* ar = &a.v[static_cast<size_t>(i) * a.cols];
        double* cr = &c.v[static_cast<size_t>(i) * c.cols];
        for (int j = 0; j < b.rows; ++j) {
            const double* br = &b.v[static_cast<size_t>(j) * b.cols];
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += ar[k] * br[k];
            cr[j] += acc;
        }
    }
}

void mm_tn(Mat& c, const Mat& a, const Mat& b) {
    // c(i,j) += sum_k a(k,i) * b(k,j)
    for (int k = 0; k < a.rows; ++k) {
        const double* ar = &a.v[static_cast<size_t>(k) * a.cols];
        const double* br = &b.v[static_cast<size_t>(k) * b.cols];
        for (int i = 0; i < a.cols; ++i) {
            const double av = ar[i];
            if (av == 0.0) continue;
            double* cr = &c.v[static_cast<size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; ++j) cr[j] += av * br[j];
        }
    }
}

Value Tape::push(Mat value, bool is_tracked, std::function<void(Tape&)> back) {
#ifndef NDEBUG
    for (double x : value.v) {
        if (!std::isfinite(x)) throw NumericError("tape produced a non-finite value");
    }
#endif
    Node n;
    n.value = std::move(value);
    n.tracked = is_tracked;
    if (is_tracked) {
        n.grad = Mat(n.value.rows, n.value.cols);
        n.back = std::move(back);
    }
    nodes_.push_back(std::move(n));
    return Value{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check_shape(Value v, int rows, int cols, const char* op) const {
    const Mat& m = node(v).value;
    if ((rows >= 0 && m.rows != rows) || (cols >= 0 && m.cols != cols)) {
        throw NumericError(std::string(op) + ": shape mismatch (" + std::to_string(m.rows) +
                           "x" + std::to_string(m.cols) + " vs expected " +
                           std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
}

Value Tape::input(Mat m) { return push(std::move(m), false, nullptr); }
Value Tape::input(const Tensor2& t) { return input(Mat::from(t)); }
Value Tape::leaf(Mat m) { return push(std::move(m), true, nullptr); }

const Mat& Tape::val(Value v) const { return node(v).value; }
const Mat& Tape::grad(Value v) const {
    if (!node(v).tracked) throw NumericError("grad requested for an untracked node");
    return node(v).grad;
}

Value Tape::matmul(Value a, Value b) {
    const Mat& av = node(a).value;
    const Mat& bv = node(b).value;
    if (av.cols != bv.rows) {
        throw NumericError("matmul: inner dimensions differ (" + std::to_string(av.cols) +
                           " vs " + std::to_string(bv.rows) + ")");
    }
    Mat out(av.rows, bv.cols);
    mm_nn(out, av, bv);
    bool trk = tracked(a) || tracked(b);
    return push(std::move(out), trk, [a, b](Tape& t) {
        Value self{static_cast<int>(&t.nodes_.back() - t.nodes_.data())};
        (void)self;
    });
}

Value Tape::add(Value a, Value b) {
    const Mat& av = node(a).value;
    check_shape(b, av.rows, av.cols, "add");
    Mat out = av;
    const Mat& bv = node(b).value;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += bv.v[i];
    bool trk = tracked(a) || tracked(b);
    return push(std::move(out), trk, nullptr);
}

Value Tape::add_n(std::span<const Value> vs) {
    if (vs.empty()) throw NumericError("add_n: empty input list");
    Value acc = vs[0];
    for (size_t i = 1; i < vs.size(); ++i) acc = add(acc, vs[i]);
    return acc;
}

Value Tape::sub(Value a, Value b) {
    const Mat& av = node(a).value;
    check_shape(b, av.rows, av.cols, "sub");
    Mat out = av;
    const Mat& bv = node(b).value;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= bv.v[i];
    bool trk = tracked(a) || tracked(b);
    return push(std::move(out), trk, nullptr);
}

void Tape::backward(Value loss) {
    if (ran_backward_) throw NumericError("backward called twice on one tape");
    const Mat& lv = node(loss).value;
    if (lv.rows != 1 || lv.cols != 1) throw NumericError("backward: loss must be 1x1");
    if (!node(loss).tracked) throw NumericError("backward: loss does not depend on any leaf");
    ran_backward_ = true;
    node(loss).grad.at(0, 0) = 1.0;
    for (int id = loss.id; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (n.tracked && n.back) n.back(*this);
    }
}

}  // namespace relflow::ad
