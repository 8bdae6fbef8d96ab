#include "sacscore/corpus/corpus.hpp"

namespace sacscore::corpus {

namespace {

using sacrifice::Bucket;

CorpusEntry queen(std::string label, std::string url, std::string white, std::string black)
{
    CorpusEntry e;
    e.label = std::move(label);
    e.bucket = Bucket::queen;
    e.source_url = std::move(url);
    e.white = std::move(white);
    e.black = std::move(black);
    return e;
}

CorpusEntry rook_or_knight(std::string label, std::string url, std::string white, std::string black, int year,
                           std::string event, std::string annotations)
{
    CorpusEntry e;
    e.label = std::move(label);
    e.bucket = Bucket::rook_or_knight;
    e.source_url = std::move(url);
    e.white = std::move(white);
    e.black = std::move(black);
    e.year = year;
    e.event_hint = std::move(event);
    e.annotations = std::move(annotations);
    return e;
}

CorpusEntry suboptimal(CorpusEntry e, double loss)
{
    e.published_verdict = PublishedVerdict::suboptimal;
    e.published_cp_loss = loss;
    return e;
}

CorpusEntry annotated(CorpusEntry e, std::string note)
{
    e.annotations = std::move(note);
    return e;
}

CorpusEntry anchored(CorpusEntry e, int figure, std::string fen, std::vector<std::string> sequence)
{
    e.figure = figure;
    e.fen_anchor = std::move(fen);
    e.anchor_sequence = std::move(sequence);
    return e;
}

std::vector<CorpusEntry> build()
{
    const std::string li = "https://lichess.org/";
    std::vector<CorpusEntry> v;

    // Queen sacrifices.
    v.push_back(anchored(suboptimal(queen("Karpov vs Timman", li + "PfP7BaoG", "Karpov", "Timman"), 1.1), 4,
                         "2kr1b1r/1pp2ppp/p1P1p3/P3q3/1n6/2N1BB2/1P3PPP/R2Q1RK1 b Qk - 0 1",
                         {"dxc6", "Rxd1", "cxb7+"}));
    v.push_back(anchored(queen("Karpov vs Ribli", li + "vdsAKx53", "Karpov", "Ribli"), 1,
                         "3rn1k1/5ppn/1p1P4/1r2pPP1/2q1P3/5BK1/1R5Q/3R4 w q - 0 1",
                         {"Qh7+", "Bxh7", "Rh2+", "Kg8", "Rdh1", "f6", "Rh8+"}));
    v.push_back(anchored(queen("Tatai vs Karpov", li + "y7IW9P5S", "Tatai", "Karpov"), 2,
                         "r3r1k1/1p4bp/6p1/8/1p1qp1b1/P5P1/1PQ1PPBP/R2NK2R b KQq - 0 1",
                         {"Qd3", "exd3", "exd3+", "Kd2", "Re2+"}));
    v.push_back(queen("Karpov vs Nedelin", li + "nSJjooS6", "Karpov", "Nedelin"));
    v.push_back(queen("Cordoba vs Karpov", li + "uzOxZG0w", "Cordoba", "Karpov"));
    v.push_back(suboptimal(queen("Yakovich vs Karpov", li + "5I2u20Dj", "Yakovich", "Karpov"), 1.0));
    v.push_back(queen("Anand vs Karpov", li + "3WymLrly", "Anand", "Karpov"));
    v.push_back(anchored(queen("Karpov vs Anand", "https://www.chessgames.com/perl/chessgame?gid=1018838", "Karpov",
                               "Anand"),
                         3, "7Q/5kpp/5n2/4n1B1/4q3/5R2/PP4KP/R7 w - - 0 1", {"Qxg7+", "Kxg7", "Bxf6+", "Kg6", "Bxe5"}));
    v.push_back(annotated(queen("Karpov vs Topalov", li + "C5EJgum1", "Karpov", "Topalov"), "Queens were traded"));
    v.push_back(queen("Karpov vs Gelfand", li + "lMO1qykc", "Karpov", "Gelfand"));
    v.push_back(annotated(queen("Karpov vs Campora", li + "07PjVaPW", "Karpov", "Campora"),
                          "Both sides sacrificed their Q"));
    v.push_back(annotated(queen("Kurajica vs Karpov", li + "ISlTcLWy", "Kurajica", "Karpov"),
                          "Both sides sacrificed their Q"));
    v.push_back(queen("Karpov vs Adianto", li + "MWHXOcjy", "Karpov", "Adianto"));
    v.push_back(suboptimal(queen("Flores vs Karpov", li + "Ho2zfNYs", "Flores", "Karpov"), 2.1));
    v.push_back(queen("Ghaem Maghami vs Karpov", li + "aUdZ4APF", "Ghaem Maghami", "Karpov"));
    v.push_back(queen("Karpov vs Krysztofiak", li + "kj16eXtO", "Karpov", "Krysztofiak"));

    // Rook and knight sacrifices.
    v.push_back(anchored(rook_or_knight("Karpov vs Veselin Topalov", li + "aDpwGujT", "Karpov", "Topalov", 1994,
                                        "Linares", "Karpov's Immortal; N, R for B later"),
                         5, "rq3rk1/3bbp2/p1npp1p1/1p6/2P2P2/1NN3P1/PP1Q1PB1/R3R1K1 w Qq - 0 1",
                         {"Kc5", "dxc5", "Qxd7"}));
    v.push_back(rook_or_knight("Karpov vs Viktor Korchnoi", li + "iBDTMAvE", "Karpov", "Korchnoi", 1974,
                               "Candidates, Moscow", "P+R"));
    v.push_back(rook_or_knight("Karpov vs Veselin Topalov", li + "C5EJgum1", "Karpov", "Topalov", 1994,
                               "Dos Hermanas", "N+B"));
    v.push_back(rook_or_knight("Timman vs Karpov", li + "Bmu7xmiM", "Timman", "Karpov", 1979, "Montreal", "B + N"));
    v.push_back(rook_or_knight("Karpov vs Boris Gulko", li + "8puqZrxa", "Karpov", "Gulko", 1996, "Oropesa del Mar",
                               "R + N + R"));
    v.push_back(rook_or_knight("Karpov vs Evgeny Gik", li + "dxmFLb6G", "Karpov", "Gik", 1968, "Moscow", "R"));
    v.push_back(rook_or_knight("Karpov vs Viktor Korchnoi", li + "R6OVhMh2", "Karpov", "Korchnoi", 1971, "Leningrad",
                               "R + R"));
    v.push_back(rook_or_knight("Karpov vs Eldis Cobo Arteaga", li + "Gy6jEE61", "Karpov", "Cobo", 1972, "Skopje",
                               "R"));
    v.push_back(rook_or_knight("Karpov vs Boris Spassky", li + "UB6SBmgU", "Karpov", "Spassky", 1973,
                               "9th Soviet Match, Moscow", "R"));
    v.push_back(suboptimal(rook_or_knight("Karpov vs Miguel A Quinteros", li + "yfHyAUeJ", "Karpov", "Quinteros",
                                          1973, "Leningrad Interzonal", "R"),
                           0.1));
    v.push_back(rook_or_knight("Karpov vs John Nunn", li + "sQUDi8Ep", "Karpov", "Nunn", 1982, "Kings, London",
                               "R?"));
    v.push_back(suboptimal(
        rook_or_knight("Seirawan vs Karpov", li + "ECcSN6AQ", "Seirawan", "Karpov", 1982, "Hamburg", "N+R"), 0.1));
    v.push_back(rook_or_knight("Karpov vs Gyula Sax", li + "2HirQOej", "Karpov", "Sax", 1983, "Linares", "N + R"));
    v.push_back(rook_or_knight("Timman vs Anatoly Karpov", li + "PrBNVqUJ", "Timman", "Karpov", 1984,
                               "Kings, London", "P+ R"));
    v.push_back(rook_or_knight("Kasparov vs Anatoly Karpov", li + "3qhsHSoO", "Kasparov", "Karpov", 1987,
                               "World Champ Seville", "offered free R, declined"));
    v.push_back(rook_or_knight("Karpov vs Vladimir P Malaniuk", li + "kRf9JRXf", "Karpov", "Malaniuk", 1988,
                               "55th USSR Champ", "R"));
    return v;
}

}  // namespace

const std::vector<CorpusEntry>& load_corpus()
{
    static const std::vector<CorpusEntry> corpus = build();
    return corpus;
}

}  // namespace sacscore::corpus
