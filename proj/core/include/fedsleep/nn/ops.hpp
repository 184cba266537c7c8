#pragma once

#include <span>
#include <vector>

namespace fedsleep::nn {

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

/// KL(softmax(q_from) || softmax(q_to)). Never negative up to rounding.
double kl_divergence(std::span<const double> q_from, std::span<const double> q_to);

/// d KL(softmax(q_from) || softmax(q_to)) / d q_to  =  softmax(q_to) - softmax(q_from).
std::vector<double> kl_grad_wrt_to(std::span<const double> q_from, std::span<const double> q_to);

/// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

}  // namespace fedsleep::nn
