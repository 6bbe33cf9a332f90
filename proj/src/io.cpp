#include "breuil/io.hpp"

#include <json.hpp>

namespace breuil {

using nlohmann::json;

namespace {

json coeffs_json(const TruncPoly& a) {
    int len = a.order();
    while (len > 0 && a.coeff(len - 1) == 0) --len;
    json out = json::array();
    for (int i = 0; i < len; ++i) out.push_back(a.coeff(i));
    return out;
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(coeffs_json(m.at(i, j)));
        out.push_back(row);
    }
    return out;
}

json module_json(const PhiModule& m, const Matrix* n_op) {
    json doc;
    doc["format"] = "breuil-phimod/1";
    doc["p"] = m.params.p;
    doc["e"] = m.params.e;
    doc["r"] = m.params.r;
    doc["s"] = m.params.s;
    doc["d"] = m.rank();
    doc["c"] = coeffs_json(m.params.c);
    doc["A"] = matrix_json(m.a);
    if (n_op) doc["N"] = matrix_json(*n_op);
    return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& ex) {
        throw ParseError(std::string("invalid JSON: ") + ex.what());
    }
}

int read_int(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer())
        throw ParseError(std::string("missing or non-integer field '") + key + "'");
    return doc[key].get<int>();
}

void expect_format(const json& doc, const std::string& tag) {
    if (!doc.is_object() || !doc.contains("format") || !doc["format"].is_string() ||
        doc["format"].get<std::string>() != tag)
        throw ParseError("expected a document with format tag '" + tag + "'");
}

TruncPoly coeffs_from_json(const json& arr, int p, int s, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string(what) + ": coefficient list is not an array");
    if (static_cast<int>(arr.size()) > s)
        throw ParseError(std::string(what) + ": more than s coefficients");
    TruncPoly out(p, s);
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number_integer()) throw ParseError(std::string(what) + ": non-integer coefficient");
        const long v = arr[i].get<long>();
        if (v < 0 || v >= p)
            throw ParseError(std::string(what) + ": coefficient out of range [0, p)");
        out.set_coeff(static_cast<int>(i), v);
    }
    return out;
}

Matrix matrix_from_json(const json& arr, int p, int s, int rows, int cols, const char* what) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows)
        throw ParseError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    Matrix m(p, s, rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = arr[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(std::string(what) + ": expected " + std::to_string(cols) + " columns");
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = coeffs_from_json(row[static_cast<size_t>(j)], p, s, what);
    }
    return m;
}

ParsedModule module_from_json(const json& doc) {
    expect_format(doc, "breuil-phimod/1");
    const int p = read_int(doc, "p"), e = read_int(doc, "e"), r = read_int(doc, "r"),
              s = read_int(doc, "s"), d = read_int(doc, "d");
    if (d < 0) throw ParseError("negative rank");
    if (p < 2 || s < 1) throw ParseError("nonsense parameters");
    if (!doc.contains("c") || !doc.contains("A")) throw ParseError("missing 'c' or 'A'");
    try {
        const RingParams params(p, e, r, s, coeffs_from_json(doc["c"], p, s, "c"));
        const Matrix a = matrix_from_json(doc["A"], p, s, d, d, "A");
        ParsedModule out{validate_object(params, a), std::nullopt};
        if (doc.contains("N")) {
            const Matrix n_op = matrix_from_json(doc["N"], p, s, d, d, "N");
            make_monodromy_module(out.module, n_op);  // structural validation
            out.n_op = n_op;
        }
        return out;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& ex) {
        throw ValidationError(ex.what());
    }
}

}  // namespace

std::string serialize_module(const PhiModule& m) { return dump(module_json(m, nullptr)); }

std::string serialize_monodromy(const MonodromyModule& m) {
    return dump(module_json(m.base, &m.n_op));
}

std::string serialize_morphism(const PhiMorphism& f) {
    json doc;
    doc["format"] = "breuil-morphism/1";
    doc["source"] = module_json(f.source, nullptr);
    doc["target"] = module_json(f.target, nullptr);
    doc["X"] = matrix_json(f.x);
    return dump(doc);
}

std::string serialize_sequence(const ShortExactSeq& seq) {
    json doc;
    doc["format"] = "breuil-seq/1";
    doc["left"] = module_json(seq.left, nullptr);
    doc["middle"] = module_json(seq.middle, nullptr);
    doc["right"] = module_json(seq.right, nullptr);
    doc["injX"] = matrix_json(seq.inj.x);
    doc["surjX"] = matrix_json(seq.surj.x);
    return dump(doc);
}

std::string serialize_matrix(const Matrix& m) {
    json doc;
    doc["format"] = "breuil-matrix/1";
    doc["p"] = m.field_char();
    doc["s"] = m.order();
    doc["rows"] = m.rows();
    doc["cols"] = m.cols();
    doc["entries"] = matrix_json(m);
    return dump(doc);
}

ParsedModule parse_module(const std::string& text) { return module_from_json(parse_text(text)); }

PhiMorphism parse_morphism(const std::string& text) {
    const json doc = parse_text(text);
    expect_format(doc, "breuil-morphism/1");
    if (!doc.contains("source") || !doc.contains("target") || !doc.contains("X"))
        throw ParseError("morphism document needs 'source', 'target' and 'X'");
    const ParsedModule src = module_from_json(doc["source"]);
    const ParsedModule tgt = module_from_json(doc["target"]);
    if (src.module.params != tgt.module.params)
        throw ValidationError("morphism endpoints have different parameters");
    const Matrix x = matrix_from_json(doc["X"], src.module.params.p, src.module.params.s,
                                      src.module.rank(), tgt.module.rank(), "X");
    try {
        return morphism_from_x(src.module, tgt.module, x);
    } catch (const Error& ex) {
        throw ValidationError(ex.what());
    }
}

ShortExactSeq parse_sequence(const std::string& text) {
    const json doc = parse_text(text);
    expect_format(doc, "breuil-seq/1");
    for (const char* key : {"left", "middle", "right", "injX", "surjX"})
        if (!doc.contains(key)) throw ParseError(std::string("sequence document needs '") + key + "'");
    const ParsedModule left = module_from_json(doc["left"]);
    const ParsedModule middle = module_from_json(doc["middle"]);
    const ParsedModule right = module_from_json(doc["right"]);
    const RingParams& params = middle.module.params;
    if (left.module.params != params || right.module.params != params)
        throw ValidationError("sequence parameters disagree");
    const Matrix inj_x = matrix_from_json(doc["injX"], params.p, params.s, left.module.rank(),
                                          middle.module.rank(), "injX");
    const Matrix surj_x = matrix_from_json(doc["surjX"], params.p, params.s, middle.module.rank(),
                                           right.module.rank(), "surjX");
    try {
        return ShortExactSeq{left.module, middle.module, right.module,
                             morphism_from_x(left.module, middle.module, inj_x),
                             morphism_from_x(middle.module, right.module, surj_x)};
    } catch (const Error& ex) {
        throw ValidationError(ex.what());
    }
}

Matrix parse_matrix(const std::string& text) {
    const json doc = parse_text(text);
    expect_format(doc, "breuil-matrix/1");
    const int p = read_int(doc, "p"), s = read_int(doc, "s"), rows = read_int(doc, "rows"),
              cols = read_int(doc, "cols");
    if (!doc.contains("entries")) throw ParseError("matrix document needs 'entries'");
    return matrix_from_json(doc["entries"], p, s, rows, cols, "entries");
}

TruncPoly random_poly(Rng& rng, int p, int s) {
    TruncPoly out(p, s);
    for (int i = 0; i < s; ++i) out.set_coeff(i, static_cast<long>(rng.below(static_cast<uint64_t>(p))));
    return out;
}

TruncPoly random_unit(Rng& rng, int p, int s) {
    TruncPoly out = random_poly(rng, p, s);
    out.set_coeff(0, 1 + static_cast<long>(rng.below(static_cast<uint64_t>(p - 1))));
    return out;
}

Matrix random_matrix(Rng& rng, int p, int s, int rows, int cols) {
    Matrix m(p, s, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = random_poly(rng, p, s);
    return m;
}

Matrix random_invertible(Rng& rng, int p, int s, int n) {
    Matrix m = Matrix::identity(p, s, n);
    if (n == 0) return m;
    const int ops = 3 * n * n + 2;
    for (int k = 0; k < ops; ++k) {
        if (rng.below(3) == 0) {
            const int i = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            const TruncPoly unit = random_unit(rng, p, s);
            for (int j = 0; j < n; ++j) m.at(i, j) = m.at(i, j) * unit;
        } else {
            const int i = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            int j = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            if (i == j) j = (j + 1) % n;
            if (i == j) continue;
            const TruncPoly q = random_poly(rng, p, s);
            for (int col = 0; col < n; ++col) m.at(i, col) = m.at(i, col) + q * m.at(j, col);
        }
    }
    return m;
}

PhiModule random_object(uint64_t seed, const RingParams& params, int rank) {
    Rng rng(seed);
    return random_object_rng(rng, params, rank);
}

PhiModule random_object_rng(Rng& rng, const RingParams& params, int rank) {
    if (rank < 0) throw ParamViolation("random_object: negative rank");
    if (rank == 0) return zero_object(params);
    std::vector<int> exps;
    for (int i = 0; i < rank; ++i) exps.push_back(rng.range(0, params.er()));
    const Matrix a = Matrix::u_diagonal(params.p, params.s, rank, rank, exps) *
                     random_invertible(rng, params.p, params.s, rank);
    return validate_object(params, a);
}

PhiModule random_unipotent_object_rng(Rng& rng, const RingParams& params, int rank) {
    if (rank == 0) return zero_object(params);
    for (int attempt = 0; attempt < 40; ++attempt) {
        PhiModule cand = random_object_rng(rng, params, rank);
        if (is_unipotent(cand)) return cand;
    }
    // Iterated extension of unipotent rank-1 objects: diagonal entries with
    // positive exponent, lower blocks divisible by u^{er}.
    const int p = params.p, s = params.s;
    Matrix a(p, s, rank, rank);
    for (int i = 0; i < rank; ++i) {
        a.at(i, i) = TruncPoly::u_power(p, s, rng.range(1, params.er())) * random_unit(rng, p, s);
        for (int j = 0; j < i; ++j)
            a.at(i, j) = random_poly(rng, p, s) * TruncPoly::u_power(p, s, params.er());
    }
    PhiModule core = validate_object(params, a);
    const TransportedObject moved = transport_object(core, random_invertible(rng, p, s, rank));
    if (!is_unipotent(moved.module))
        throw InternalCheckFailed("random_unipotent_object: constructive fallback not unipotent");
    return moved.module;
}

PhiMorphism random_morphism_rng(Rng& rng, const PhiModule& m1, const PhiModule& m2) {
    const std::vector<PhiMorphism> homs = hom_space(m1, m2);
    if (homs.empty()) return zero_morphism(m1, m2);
    const int p = m1.params.p, s = m1.params.s;
    Matrix x(p, s, m1.rank(), m2.rank());
    Matrix y = x;
    for (const PhiMorphism& h : homs) {
        const int coeff = static_cast<int>(rng.below(static_cast<uint64_t>(p)));
        if (coeff == 0) continue;
        const TruncPoly scale = TruncPoly::constant(p, s, coeff);
        x = x + h.x.scaled(scale);
        y = y + h.phi_x.scaled(scale);
    }
    return PhiMorphism{m1, m2, x, y};
}

}  // namespace breuil
