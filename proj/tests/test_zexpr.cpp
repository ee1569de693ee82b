#include <ztinv/zexpr.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <thread>

using namespace ztinv;

namespace {
Complex ev(const char* src, Complex z = Complex(1.0, 0.0)) { return eval(parse(src), z); }
}

TEST_CASE("tokenize splits expressions") {
    SECTION("small expression") {
        const auto t = tokenize("z^-1 + 2");
        REQUIRE(t.size() == 6);
        REQUIRE(t[0].kind == TokenKind::identifier);
        REQUIRE(t[0].lexeme == "z");
        REQUIRE(t[1].kind == TokenKind::caret);
        REQUIRE(t[2].kind == TokenKind::minus);
        REQUIRE(t[3].kind == TokenKind::number);
        REQUIRE(t[4].kind == TokenKind::plus);
        REQUIRE(t[5].lexeme == "2");
        REQUIRE(t[5].position == 7);
    }
    SECTION("function product") {
        REQUIRE(tokenize("exp(1/z)*sin(1/z)").size() == 13);
    }
    SECTION("numbers with exponents and bare dots") {
        const auto t = tokenize("1.5e2 .25 3.");
        REQUIRE(t.size() == 3);
        REQUIRE(t[0].lexeme == "1.5e2");
        REQUIRE(t[1].lexeme == ".25");
        REQUIRE(t[2].lexeme == "3.");
    }
    SECTION("'e' not followed by digits is an identifier") {
        const auto t = tokenize("2e");
        REQUIRE(t.size() == 2);
        REQUIRE(t[0].lexeme == "2");
        REQUIRE(t[1].kind == TokenKind::identifier);
    }
    SECTION("unknown characters carry their offset") {
        try {
            tokenize("1 & 2");
            FAIL("expected LexError");
        } catch (const LexError& e) {
            REQUIRE(e.position == 2);
        }
    }
    SECTION("literal overflow is a lex error") {
        REQUIRE_THROWS_AS(tokenize("1e999"), LexError);
    }
}

TEST_CASE("parse builds the expected trees") {
    SECTION("z^-1 and z^(-1) agree") {
        REQUIRE(structurally_equal(parse("z^-1"), parse("z^(-1)")));
    }
    SECTION("caret binds tighter than unary minus and associates right") {
        REQUIRE(ev("-z^2", Complex(3.0, 0.0)) == Complex(-9.0, 0.0));
        REQUIRE(ev("2^3^2").real() == Catch::Approx(512.0));
    }
    SECTION("operator precedence") {
        REQUIRE(ev("1+2*3").real() == Catch::Approx(7.0));
        REQUIRE(ev("(1+2)*3").real() == Catch::Approx(9.0));
        REQUIRE(ev("2*z^-1", Complex(4.0, 0.0)).real() == Catch::Approx(0.5));
    }
    SECTION("named constants fold at parse time") {
        REQUIRE(parse("pi").root->kind == NodeKind::constant);
        REQUIRE(ev("cos(pi)").real() == Catch::Approx(-1.0));
        REQUIRE(ev("e").real() == Catch::Approx(2.718281828459045));
    }
    SECTION("parse errors") {
        REQUIRE_THROWS_AS(parse(""), ParseError);
        REQUIRE_THROWS_AS(parse("2z"), ParseError);     // no implicit multiplication
        REQUIRE_THROWS_AS(parse("sin()"), ParseError);  // empty argument
        REQUIRE_THROWS_AS(parse("foo(1)"), ParseError); // unknown function
        REQUIRE_THROWS_AS(parse("z(1)"), ParseError);   // z is not callable
        REQUIRE_THROWS_AS(parse("(1+2"), ParseError);   // unbalanced
        REQUIRE_THROWS_AS(parse("1+*2"), ParseError);
    }
    SECTION("parse error reports position and expectation") {
        try {
            parse("1+*2");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            REQUIRE(e.position == 2);
            REQUIRE_FALSE(e.expectation.empty());
        }
    }
}

TEST_CASE("eval computes complex values") {
    SECTION("constants and arithmetic") {
        REQUIRE(ev("2.5", Complex(9.0, 9.0)) == Complex(2.5, 0.0));
        REQUIRE(ev("e*sin(1)").real() == Catch::Approx(2.718281828459045 * std::sin(1.0)));
    }
    SECTION("z^-1 uses a single exact division") {
        REQUIRE(ev("z^-1", Complex(2.0, 0.0)) == Complex(0.5, 0.0));
        REQUIRE(ev("z^-1", Complex(0.0, 2.0)) == Complex(0.0, -0.5));
    }
    SECTION("integer powers avoid the log branch") {
        REQUIRE(ev("z^10", Complex(-1.0, 0.0)) == Complex(1.0, 0.0));
        REQUIRE(ev("(0-2)^3").real() == Catch::Approx(-8.0));
    }
    SECTION("non-integer powers take the principal branch") {
        const Complex v = ev("z^0.5", Complex(0.0, 1.0));
        REQUIRE(v.real() == Catch::Approx(std::cos(3.14159265358979323846 / 4)));
        REQUIRE(v.imag() == Catch::Approx(std::sin(3.14159265358979323846 / 4)));
    }
    SECTION("essential-singularity example") {
        REQUIRE(ev("exp(1/z)*sin(1/z)", Complex(1.0, 0.0)).real() ==
                Catch::Approx(std::exp(1.0) * std::sin(1.0)));
    }
    SECTION("division by zero") {
        REQUIRE_THROWS_AS(ev("1/(z-z)", Complex(2.0, 0.0)), EvalError);
        REQUIRE_THROWS_AS(ev("z^-1", Complex(0.0, 0.0)), EvalError);
    }
    SECTION("log of zero") {
        REQUIRE_THROWS_AS(ev("log(0)"), EvalError);
    }
    SECTION("non-finite intermediates are rejected") {
        REQUIRE_THROWS_AS(ev("exp(1e300)"), EvalError);
    }
    SECTION("abs returns a real value") {
        REQUIRE(ev("abs(z)", Complex(3.0, 4.0)) == Complex(5.0, 0.0));
    }
}

TEST_CASE("z-free expressions are constant in z") {
    const ExprAst ast = parse("exp(1)+2^3*cos(0.5)");
    const Complex first = eval(ast, Complex(1.0, 0.0));
    SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Complex z = std::polar(0.1 + 3.0 * rng.uniform01(), 6.28 * rng.uniform01());
        REQUIRE(eval(ast, z) == first);
    }
}

TEST_CASE("fractional powers of z are detected") {
    REQUIRE(has_fractional_power_of_z(parse("z^0.5")));
    REQUIRE(has_fractional_power_of_z(parse("sqrt(z)")));
    REQUIRE(has_fractional_power_of_z(parse("z^(1/2)")));
    REQUIRE(has_fractional_power_of_z(parse("1 + 3*z^-1.5")));
    REQUIRE(has_fractional_power_of_z(parse("exp(sqrt(z^-1))")));

    REQUIRE_FALSE(has_fractional_power_of_z(parse("z^-1")));
    REQUIRE_FALSE(has_fractional_power_of_z(parse("z^(3-1)"))); // folds to an integer
    REQUIRE_FALSE(has_fractional_power_of_z(parse("exp(1/z)*sin(1/z)")));
    REQUIRE_FALSE(has_fractional_power_of_z(parse("sqrt(2)*z^-1")));
    REQUIRE_FALSE(has_fractional_power_of_z(parse("2^0.5")));
    // A z-dependent exponent is not a *constant* non-integer exponent.
    REQUIRE_FALSE(has_fractional_power_of_z(parse("z^z")));
}

TEST_CASE("concurrent eval of a shared AST is safe") {
    const ExprAst ast = parse("exp(1/z)*sin(1/z)+z^-2");
    const Complex z(1.3, 0.4);
    const Complex expected = eval(ast, z);
    std::vector<std::thread> pool;
    std::vector<int> mismatches(4, 0);
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            for (int i = 0; i < 2000; ++i)
                if (eval(ast, z) != expected) ++mismatches[static_cast<std::size_t>(t)];
        });
    }
    for (auto& th : pool) th.join();
    for (int m : mismatches) REQUIRE(m == 0);
}

namespace {

// Random parser-shaped AST: constants are non-negative (the grammar has no
// negative literals; sign arrives via negate nodes), and every shape the
// parser can produce appears.
ExprNodePtr random_ast(SplitMix64& rng, int depth) {
    const auto leaf = [&]() -> ExprNodePtr {
        if (rng.uniform01() < 0.4) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::variable_z;
            return n;
        }
        const double pool[] = {0.0, 1.0, 2.0, 0.5, 3.25, 10.0, 0.125};
        return detail::make_constant(pool[rng.next() % 7]);
    };
    if (depth <= 0 || rng.uniform01() < 0.25) return leaf();
    switch (rng.next() % 8) {
        case 0: return detail::make_node(NodeKind::add, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 1: return detail::make_node(NodeKind::subtract, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 2: return detail::make_node(NodeKind::multiply, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 3: return detail::make_node(NodeKind::divide, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 4: return detail::make_node(NodeKind::power, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 5: return detail::make_node(NodeKind::negate, random_ast(rng, depth - 1));
        case 6: {
            const FuncId fs[] = {FuncId::exp, FuncId::sin, FuncId::cos,
                                 FuncId::sqrt, FuncId::log, FuncId::abs};
            return detail::make_call(fs[rng.next() % 6], random_ast(rng, depth - 1));
        }
        default: return leaf();
    }
}

} // namespace

TEST_CASE("format_expr output reparses to the same tree") {
    SECTION("hand-picked sources") {
        const char* sources[] = {
            "z^-1 + 2",
            "exp(1/z)*sin(1/z)",
            "1/(1-0.5*z^-1)",
            "-(z^2+1)/(z-0.5)",
            "2^-3^2",
            "1-2+3",
            "1-(2+3)",
            "-(1*2)",
            "z^(1+1)",
            "(z+1)^2*(z-1)^-2",
            "cos(pi*z^-1)+sqrt(2)",
        };
        for (const char* src : sources) {
            const ExprAst first = parse(src);
            const std::string printed = format_expr(first);
            INFO(src << "  ->  " << printed);
            REQUIRE(structurally_equal(first, parse(printed)));
        }
    }
    SECTION("random parser-shaped trees") {
        SplitMix64 rng(2024);
        for (int i = 0; i < 300; ++i) {
            const ExprAst ast{random_ast(rng, 5)};
            const std::string printed = format_expr(ast);
            INFO(printed);
            const ExprAst reparsed = parse(printed);
            REQUIRE(structurally_equal(ast, reparsed));
            // Printing again is a fixed point.
            REQUIRE(format_expr(reparsed) == printed);
        }
    }
}

TEST_CASE("structural equality ignores nothing") {
    REQUIRE(structurally_equal(parse("1+z"), parse("1 + z")));
    REQUIRE_FALSE(structurally_equal(parse("1+z"), parse("z+1")));
    REQUIRE_FALSE(structurally_equal(parse("z^-1"), parse("1/z")));
    REQUIRE_FALSE(structurally_equal(parse("sin(z)"), parse("cos(z)")));
}
