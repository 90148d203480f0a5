#include "rfreg/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rfreg {

std::vector<int> ArchSpec::stage_blocks() const {
    int s1 = (num_blocks + 1) / 2;
    int rest = num_blocks - s1;
    int s2 = (rest + 1) / 2;
    int s3 = rest - s2;
    return {s1, s2, s3};
}

void ArchSpec::validate() const {
    std::vector<std::string> problems;
    if (base_channels < 1) problems.push_back("base_channels must be >= 1");
    if (rho < 0 || rho > kRhoMax) problems.push_back("rho must be in 0..=12, got " + std::to_string(rho));
    if (num_blocks < 1) problems.push_back("num_blocks must be >= 1");
    if (num_classes < 1) problems.push_back("num_classes must be >= 1");
    if (in_channels < 1) problems.push_back("in_channels must be >= 1");
    if (damping.enabled && !(damping.lambda > 0.0f && damping.lambda <= 1.0f))
        problems.push_back("damping.lambda must be in (0, 1], got " + std::to_string(damping.lambda));
    if (decomp.enabled) {
        if (decomp.Z < 1) problems.push_back("decomp.Z must be >= 1");
        else {
            auto stages = stage_blocks();
            for (int s = 0; s < 3; ++s) {
                if (stages[s] == 0) continue;
                int ch = base_channels << s;
                if (ch % decomp.Z != 0)
                    problems.push_back("decomp.Z=" + std::to_string(decomp.Z) +
                                       " does not divide stage channels " + std::to_string(ch));
            }
            if (decomp.apply_to == DecompApplyTo::all_convs && base_channels % decomp.Z != 0)
                problems.push_back("decomp.Z=" + std::to_string(decomp.Z) + " does not divide stem channels " +
                                   std::to_string(base_channels));
        }
    }
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid ArchSpec:";
        for (const auto& p : problems) os << "\n  - " << p;
        throw ValidationError(os.str());
    }
}

namespace {

ConvUnit make_unit(int c_in, int c_out, int k, Conv2dParams p, const ArchSpec& spec, bool in_block) {
    ConvUnit unit;
    bool decompose = spec.decomp.enabled &&
                     (spec.decomp.apply_to == DecompApplyTo::all_convs || (in_block && k > 1));
    if (decompose) {
        unit.decomposed = true;
        unit.block = decompose_layer(c_in, c_out, k, spec.decomp.Z, p);
    } else {
        unit.conv = make_conv(c_in, c_out, k, k, p);
    }
    if (spec.damping.enabled && k > 1) {
        unit.damped = true;
        unit.damp = build_damping_matrix(k, k, spec.damping);
    }
    return unit;
}

void push_conv(std::vector<ParamRef>& params, const std::string& name, const ConvLayer& layer) {
    params.push_back({name + ".weight", layer.weight, true});
    params.push_back({name + ".bias", layer.bias, false});
}

void push_unit(std::vector<ParamRef>& params, const std::string& name, const ConvUnit& unit) {
    if (unit.decomposed) {
        push_conv(params, name + ".reduce", unit.block.reduce);
        push_conv(params, name + ".core", unit.block.core);
        push_conv(params, name + ".expand", unit.block.expand);
    } else {
        push_conv(params, name, unit.conv);
    }
}

void push_bn(std::vector<ParamRef>& params, const std::string& name, const BatchNorm& bn) {
    params.push_back({name + ".gamma", bn.gamma, false});
    params.push_back({name + ".beta", bn.beta, false});
}

}  // namespace

TensorPtr ConvUnit::forward(Tape* tape, const TensorPtr& x) const {
    if (decomposed)
        return damped ? damped_decomposed_forward(tape, x, block, damp) : decomposed_forward(tape, x, block);
    return damped ? damped_conv2d(tape, x, conv, damp) : conv2d(tape, x, conv);
}

Network build(const ArchSpec& spec) {
    spec.validate();
    Network net;
    net.spec = spec;

    net.stem1 = make_unit(spec.in_channels, spec.base_channels, 5, {2, 2, 2, 2}, spec, false);
    net.stem_bn1 = make_batchnorm(spec.base_channels);
    net.stem2 = make_unit(spec.base_channels, spec.base_channels, 3, {2, 2, 1, 1}, spec, false);
    net.stem_bn2 = make_batchnorm(spec.base_channels);

    auto kernels = rho_to_kernels(spec.rho, spec.num_blocks);
    auto stages = spec.stage_blocks();
    int prev_ch = spec.base_channels;
    int bi = 0;
    for (int s = 0; s < 3; ++s) {
        int ch = spec.base_channels << s;
        for (int b = 0; b < stages[s]; ++b, ++bi) {
            ResBlock block;
            int k1 = kernels[2 * bi], k2 = kernels[2 * bi + 1];
            block.conv1 = make_unit(prev_ch, ch, k1, {1, 1, (k1 - 1) / 2, (k1 - 1) / 2}, spec, true);
            block.bn1 = make_batchnorm(ch);
            block.conv2 = make_unit(ch, ch, k2, {1, 1, (k2 - 1) / 2, (k2 - 1) / 2}, spec, true);
            block.bn2 = make_batchnorm(ch);
            if (prev_ch != ch) {
                block.has_proj = true;
                block.proj = make_conv(prev_ch, ch, 1, 1);
                block.proj_bn = make_batchnorm(ch);
            }
            net.blocks.push_back(std::move(block));
            prev_ch = ch;
        }
    }
    net.pool_after_block = (stages[1] + stages[2] > 0) ? stages[0] - 1 : -1;

    net.fc_weight = make_tensor({spec.num_classes, prev_ch}, true);
    net.fc_bias = make_tensor({spec.num_classes}, true);

    push_unit(net.params, "stem1", net.stem1);
    push_bn(net.params, "stem_bn1", net.stem_bn1);
    push_unit(net.params, "stem2", net.stem2);
    push_bn(net.params, "stem_bn2", net.stem_bn2);
    for (std::size_t i = 0; i < net.blocks.size(); ++i) {
        std::string base = "block" + std::to_string(i);
        auto& blk = net.blocks[i];
        push_unit(net.params, base + ".conv1", blk.conv1);
        push_bn(net.params, base + ".bn1", blk.bn1);
        push_unit(net.params, base + ".conv2", blk.conv2);
        push_bn(net.params, base + ".bn2", blk.bn2);
        if (blk.has_proj) {
            push_conv(net.params, base + ".proj", blk.proj);
            push_bn(net.params, base + ".proj_bn", blk.proj_bn);
        }
    }
    net.params.push_back({"fc.weight", net.fc_weight, true});
    net.params.push_back({"fc.bias", net.fc_bias, false});
    return net;
}

TensorPtr Network::forward(Tape* tape, const TensorPtr& x, bool train) {
    auto h = relu(tape, batchnorm2d(tape, stem1.forward(tape, x), stem_bn1, train));
    h = relu(tape, batchnorm2d(tape, stem2.forward(tape, h), stem_bn2, train));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& blk = blocks[i];
        auto inner = relu(tape, batchnorm2d(tape, blk.conv1.forward(tape, h), blk.bn1, train));
        inner = batchnorm2d(tape, blk.conv2.forward(tape, inner), blk.bn2, train);
        auto skip = blk.has_proj ? batchnorm2d(tape, conv2d(tape, h, blk.proj), blk.proj_bn, train) : h;
        h = relu(tape, add(tape, inner, skip));
        if (static_cast<int>(i) == pool_after_block) h = max_pool2d(tape, h, 2, 2);
    }
    last_feature = h;
    auto pooled = global_avg_pool(tape, h);
    return linear(tape, pooled, fc_weight, fc_bias);
}

std::vector<LayerGeom> Network::geometry() const {
    std::vector<LayerGeom> layers;
    layers.push_back({5, 5, 2, 2, false});
    layers.push_back({3, 3, 2, 2, false});
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        int k1 = blocks[i].conv1.kernel(), k2 = blocks[i].conv2.kernel();
        layers.push_back({k1, k1, 1, 1, false});
        layers.push_back({k2, k2, 1, 1, false});
        if (static_cast<int>(i) == pool_after_block) layers.push_back({2, 2, 2, 2, true});
    }
    return layers;
}

void init_weights(Network& net, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& p : net.params) {
        Tensor& t = *p.tensor;
        if (p.name.ends_with(".weight") && t.ndim() == 4) {
            int fan_in = t.dim(1) * t.dim(2) * t.dim(3);
            std::normal_distribution<float> dist(0.0f, std::sqrt(2.0f / static_cast<float>(fan_in)));
            for (std::size_t i = 0; i < t.numel(); ++i) t.at(i) = dist(rng);
        } else if (p.name.ends_with(".weight") && t.ndim() == 2) {
            int fan_in = t.dim(1);
            std::normal_distribution<float> dist(0.0f, std::sqrt(2.0f / static_cast<float>(fan_in)));
            for (std::size_t i = 0; i < t.numel(); ++i) t.at(i) = dist(rng);
        } else if (p.name.ends_with(".gamma")) {
            for (std::size_t i = 0; i < t.numel(); ++i) t.at(i) = 1.0f;
        } else {
            for (std::size_t i = 0; i < t.numel(); ++i) t.at(i) = 0.0f;
        }
    }
}

ModelSummary summarize(const Network& net) {
    ModelSummary s;
    for (const auto& p : net.params) {
        LayerCount lc;
        lc.name = p.name;
        lc.shape = p.tensor->shape();
        lc.total = static_cast<long>(p.tensor->numel());
        if (p.prunable) {
            for (std::size_t i = 0; i < p.tensor->numel(); ++i)
                if (p.tensor->at(i) != 0.0f) ++lc.nonzero;
        } else {
            // Dense parameters (biases, batchnorm) are never pruned and are
            // stored in full whatever their value.
            lc.nonzero = lc.total;
        }
        s.total_params += lc.total;
        s.nonzero_params += lc.nonzero;
        s.per_layer.push_back(std::move(lc));
    }
    s.rf = max_rf(net.geometry());
    return s;
}

std::vector<std::pair<std::string, BatchNorm*>> batchnorm_refs(Network& net) {
    std::vector<std::pair<std::string, BatchNorm*>> refs;
    refs.emplace_back("stem_bn1", &net.stem_bn1);
    refs.emplace_back("stem_bn2", &net.stem_bn2);
    for (std::size_t i = 0; i < net.blocks.size(); ++i) {
        std::string base = "block" + std::to_string(i);
        refs.emplace_back(base + ".bn1", &net.blocks[i].bn1);
        refs.emplace_back(base + ".bn2", &net.blocks[i].bn2);
        if (net.blocks[i].has_proj) refs.emplace_back(base + ".proj_bn", &net.blocks[i].proj_bn);
    }
    return refs;
}

}  // namespace rfreg
