#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "povmrand/sdp.hpp"

namespace povmrand {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw InputError("interchange line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string exportInterchange(const SdpInstance& inst) {
    inst.validate();
    std::string out;
    out += std::to_string(inst.m()) + "\n";
    out += std::to_string(inst.blockSizes.size()) + "\n";
    for (std::size_t b = 0; b < inst.blockSizes.size(); ++b) out += (b ? " " : "") + std::to_string(inst.blockSizes[b]);
    out += "\n";
    for (int k = 0; k < inst.m(); ++k) out += (k ? " " : "") + num(inst.c[static_cast<std::size_t>(k)]);
    out += "\n";
    for (std::size_t k = 0; k < inst.F.size(); ++k)
        for (const auto& e : inst.F[k]) {
            // Interchange convention: sum_i x_i F_i - F0 >= 0.
            const double v = k == 0 ? -e.value : e.value;
            out += std::to_string(k) + " " + std::to_string(e.block + 1) + " " + std::to_string(e.i + 1) + " " +
                   std::to_string(e.j + 1) + " " + num(v) + "\n";
        }
    return out;
}

SdpInstance importInterchange(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    std::vector<std::pair<int, std::string>> content;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (content.empty() && (line[first] == '"' || line[first] == '*')) continue;  // leading comments
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '\r') ch = ' ';
        content.emplace_back(lineNo, line);
    }
    if (content.size() < 4) throw InputError("interchange text: missing header lines");

    SdpInstance inst;
    auto readInts = [&](std::size_t idx, std::vector<long>& out) {
        std::istringstream ls(content[idx].second);
        long v;
        while (ls >> v) out.push_back(v);
        if (!ls.eof()) fail(content[idx].first, "expected integers");
    };
    std::vector<long> head;
    readInts(0, head);
    if (head.size() != 1 || head[0] < 0) fail(content[0].first, "expected the number of constraint matrices");
    const int m = static_cast<int>(head[0]);
    head.clear();
    readInts(1, head);
    if (head.size() != 1 || head[0] < 1) fail(content[1].first, "expected the number of blocks");
    const auto nb = static_cast<std::size_t>(head[0]);
    head.clear();
    readInts(2, head);
    if (head.size() != nb) fail(content[2].first, "expected " + std::to_string(nb) + " block sizes");
    for (long s : head) {
        if (s == 0) fail(content[2].first, "block size zero");
        inst.blockSizes.push_back(static_cast<int>(s));
    }
    {
        std::istringstream ls(content[3].second);
        double v;
        while (ls >> v) inst.c.push_back(v);
        if (!ls.eof() || static_cast<int>(inst.c.size()) != m)
            fail(content[3].first, "expected " + std::to_string(m) + " cost coefficients");
    }
    inst.F.assign(static_cast<std::size_t>(m) + 1, {});
    for (std::size_t idx = 4; idx < content.size(); ++idx) {
        std::istringstream ls(content[idx].second);
        long k, b, i, j;
        double v;
        if (!(ls >> k >> b >> i >> j >> v)) fail(content[idx].first, "expected 'matrix block i j value'");
        std::string rest;
        if (ls >> rest) fail(content[idx].first, "trailing characters");
        if (k < 0 || k > m) fail(content[idx].first, "matrix number out of range");
        if (b < 1 || b > static_cast<long>(nb)) fail(content[idx].first, "block number out of range");
        const long size = std::abs(inst.blockSizes[static_cast<std::size_t>(b - 1)]);
        if (i < 1 || j < 1 || i > size || j > size) fail(content[idx].first, "index out of range");
        if (i > j) std::swap(i, j);
        if (inst.blockSizes[static_cast<std::size_t>(b - 1)] < 0 && i != j)
            fail(content[idx].first, "off-diagonal entry in a diagonal block");
        inst.F[static_cast<std::size_t>(k)].push_back(
            {static_cast<int>(b - 1), static_cast<int>(i - 1), static_cast<int>(j - 1), k == 0 ? -v : v});
    }
    for (auto& mat : inst.F) {
        std::stable_sort(mat.begin(), mat.end(), [](const SdpEntry& a, const SdpEntry& b) {
            return std::tie(a.block, a.i, a.j) < std::tie(b.block, b.i, b.j);
        });
        std::vector<SdpEntry> merged;
        for (const auto& e : mat) {
            if (!merged.empty() && merged.back().block == e.block && merged.back().i == e.i && merged.back().j == e.j)
                merged.back().value += e.value;
            else
                merged.push_back(e);
        }
        mat = std::move(merged);
    }
    return inst;
}

}  // namespace povmrand
