#include "skge/model_io.hpp"

#include "skge/error.hpp"

#include "json.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

namespace skge {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_floats(std::string& out, const std::vector<double>& values) {
    for (double v : values)
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

}  // namespace

std::string encode_model(const EmbeddingModel& model) {
    const auto& cfg = model.config();
    nlohmann::ordered_json header;
    header["algorithm"] = std::string(to_string(cfg.algorithm));
    header["d"] = cfg.dimension;
    header["n"] = model.entity_count();
    header["m"] = model.relation_count();
    header["transe_norm"] = std::string(to_string(cfg.transe_norm));
    header["seed"] = cfg.seed;
    const std::string h = header.dump();

    std::string out;
    out.reserve(kModelMagic.size() + 4 + h.size() + 4 * model.parameter_count());
    out.append(kModelMagic);
    put_u32(out, static_cast<std::uint32_t>(h.size()));
    out.append(h);
    put_floats(out, model.entity_data());
    put_floats(out, model.relation_data());
    return out;
}

EmbeddingModel decode_model(std::string_view bytes) {
    using Kind = ModelFormatError::Kind;
    if (bytes.size() < kModelMagic.size() || bytes.substr(0, 4) != kModelMagic.substr(0, 4))
        throw ModelFormatError(Kind::BadMagic, "not a model file (bad magic)");
    if (bytes.substr(0, kModelMagic.size()) != kModelMagic)
        throw ModelFormatError(Kind::UnsupportedVersion, "unsupported model file version '" +
                                                             std::string(bytes.substr(4, 4)) + "'");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t off = kModelMagic.size();
    if (bytes.size() < off + 4)
        throw ModelFormatError(Kind::SizeMismatch, "truncated model file (no header length)");
    const std::uint32_t hlen = get_u32(p + off);
    off += 4;
    if (bytes.size() < off + hlen)
        throw ModelFormatError(Kind::SizeMismatch, "truncated model file (header)");

    ModelConfig cfg;
    std::size_t n = 0, m = 0;
    try {
        auto header = nlohmann::json::parse(bytes.substr(off, hlen));
        cfg.algorithm = parse_algorithm(header.at("algorithm").get<std::string>());
        cfg.dimension = header.at("d").get<std::size_t>();
        cfg.transe_norm = parse_norm(header.at("transe_norm").get<std::string>());
        cfg.seed = header.at("seed").get<std::uint64_t>();
        n = header.at("n").get<std::size_t>();
        m = header.at("m").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(Kind::BadHeader, std::string("bad model header: ") + e.what());
    } catch (const ParameterError& e) {
        throw ModelFormatError(Kind::BadHeader, std::string("bad model header: ") + e.what());
    }
    if (cfg.dimension == 0)
        throw ModelFormatError(Kind::BadHeader, "bad model header: d must be >= 1");
    off += hlen;

    // Validate sizes before allocating so a corrupt header cannot request
    // an arbitrary amount of memory.
    const std::size_t d = cfg.dimension;
    const std::size_t budget = bytes.size() / 4 + 1;
    const std::size_t width = cfg.algorithm == Algorithm::RESCAL ? d * d : d;
    if (d > budget || width / d != (cfg.algorithm == Algorithm::RESCAL ? d : 1) || (n && d > budget / n) ||
        (m && width > budget / m))
        throw ModelFormatError(Kind::SizeMismatch, "model file size mismatch: header declares more parameters "
                                                   "than the file holds");
    const std::size_t expected = off + 4 * (n * d + m * width);
    if (bytes.size() != expected)
        throw ModelFormatError(Kind::SizeMismatch, "model file size mismatch: expected " +
                                                       std::to_string(expected) + " bytes, found " +
                                                       std::to_string(bytes.size()));
    EmbeddingModel model(cfg, n, m);
    for (auto* block : {&model.entity_data(), &model.relation_data()}) {
        for (auto& v : *block) {
            v = static_cast<double>(std::bit_cast<float>(get_u32(p + off)));
            off += 4;
        }
    }
    return model;
}

void save_model(const EmbeddingModel& model, const std::string& path) {
    write_file_atomic(path, encode_model(model));
}

EmbeddingModel load_model(const std::string& path) { return decode_model(read_file(path)); }

std::string encode_vocab(const Vocab& vocab) {
    std::string out;
    for (const auto& l : vocab.labels())
        out.append(l).push_back('\n');
    return out;
}

Vocab decode_vocab(std::string_view text) {
    Vocab v;
    std::size_t pos = 0, line = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        ++line;
        auto label = text.substr(pos, end - pos);
        pos = end + 1;
        const auto before = v.size();
        try {
            v.intern(label);
        } catch (const ValidationError& e) {
            throw ParseError(line, e.what());
        }
        if (v.size() == before)
            throw ParseError(line, "duplicate label '" + std::string(label) + "'");
    }
    return v;
}

std::string entities_sidecar(const std::string& model_path) { return model_path + ".entities.txt"; }
std::string relations_sidecar(const std::string& model_path) { return model_path + ".relations.txt"; }

}  // namespace skge
