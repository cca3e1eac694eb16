"""
AdS-Fronts - Lenguaje de Expresiones de Inmersión
==================================================

PROPÓSITO:
----------
Analizar expresiones cerradas en las variables s y t que definen las
componentes de una inmersión Γ(s,t), evaluarlas sobre escalares o arreglos
numpy, y derivarlas simbólicamente sobre el árbol (hasta 4º orden en s y
1º en t, sin límite práctico).

GRAMÁTICA (EBNF):
-----------------
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' ['-'] number)?
    atom   := number | 's' | 't' | ident '(' expr ')' | '(' expr ')'

Funciones: sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt.
No hay multiplicación implícita ("2s" es un error de sintaxis).

DISEÑO:
-------
- Los nodos son inmutables e internados: dos subárboles estructuralmente
  iguales son el mismo objeto. Así las derivadas sucesivas comparten
  subárboles y la evaluación con memo recorre un DAG pequeño.
- El analizador conserva la forma escrita; la derivación usa constructores
  que pliegan constantes y simplifican identidades con 0 y 1.

VERSIÓN: 1.0
"""

import math
import re
import threading
import weakref
from dataclasses import dataclass
from functools import lru_cache, singledispatch
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from pseudo_metric import AdSError

# ============================================================================
# CONSTANTES
# ============================================================================

VARIABLES = ("s", "t")

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}

BINARY_OPS = ("+", "-", "*", "/", "^")

Numero = Union[float, np.ndarray]


# ============================================================================
# ERRORES
# ============================================================================

class ExprError(AdSError):
    """Error base del lenguaje de expresiones"""


class DSLSyntaxError(ExprError):
    """Texto mal formado; lleva el desplazamiento en bytes y lo esperado"""

    def __init__(self, message: str, offset: int, expected: str):
        super().__init__(f"{message} (byte {offset}; se esperaba {expected})")
        self.offset = offset
        self.expected = expected


class UnknownFunction(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"Función desconocida '{name}' en byte {offset}")
        self.name = name
        self.offset = offset


class UnknownVariable(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"Variable desconocida '{name}' en byte {offset} (solo s y t)")
        self.name = name
        self.offset = offset


class EvaluationError(ExprError):
    """Fallo al evaluar una expresión"""


class DomainError(EvaluationError):
    """Argumento fuera del dominio (log ≤ 0, sqrt < 0, división por cero...)"""

    def __init__(self, message: str, subexpression: "Expr"):
        super().__init__(f"{message}: {to_text(subexpression)}")
        self.subexpression = subexpression


# ============================================================================
# NODOS DEL ÁRBOL
# ============================================================================

class Expr:
    """Nodo base; la igualdad es identidad porque los nodos están internados"""
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Constant(Expr):
    value: float


@dataclass(frozen=True, eq=False)
class Variable(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class Unary(Expr):
    op: str
    child: Expr


@dataclass(frozen=True, eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Call(Expr):
    func: str
    arg: Expr


# Débil: un nodo sin referencias externas sale de la tabla. Las claves usan
# id() de los hijos, que siguen vivos mientras viva el padre.
_TABLA_INTERNADO: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()
_CANDADO_INTERNADO = threading.Lock()


def _nodo(cls, *campos) -> Expr:
    """Devuelve el nodo canónico para (cls, campos)"""
    clave = (cls,) + tuple(id(c) if isinstance(c, Expr) else c for c in campos)
    nodo = _TABLA_INTERNADO.get(clave)
    if nodo is None:
        with _CANDADO_INTERNADO:
            nodo = _TABLA_INTERNADO.get(clave)
            if nodo is None:
                nodo = cls(*campos)
                _TABLA_INTERNADO[clave] = nodo
    return nodo


def constant(value: float) -> Constant:
    value = float(value)
    if value == 0.0:
        value = 0.0  # -0.0 y 0.0 comparten nodo
    return _nodo(Constant, value)


def variable(name: str) -> Variable:
    return _nodo(Variable, name)


ZERO = constant(0.0)
ONE = constant(1.0)


def _es_constante(e: Expr, valor: float = None) -> bool:
    if not isinstance(e, Constant):
        return False
    return valor is None or e.value == valor


def _plegar(valor: float):
    """Constante plegada si el resultado es finito, None si no"""
    return constant(valor) if math.isfinite(valor) else None


# ----------------------------------------------------------------------------
# Constructores con simplificación (usados por la derivación)
# ----------------------------------------------------------------------------

def neg(a: Expr) -> Expr:
    if isinstance(a, Constant):
        return constant(-a.value)
    if isinstance(a, Unary) and a.op == "-":
        return a.child
    return _nodo(Unary, "-", a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return constant(a.value + b.value)
    if _es_constante(a, 0.0):
        return b
    if _es_constante(b, 0.0):
        return a
    if isinstance(b, Unary) and b.op == "-":
        return sub(a, b.child)
    return _nodo(Binary, "+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return constant(a.value - b.value)
    if _es_constante(b, 0.0):
        return a
    if _es_constante(a, 0.0):
        return neg(b)
    if a is b:
        return ZERO
    if isinstance(b, Unary) and b.op == "-":
        return add(a, b.child)
    return _nodo(Binary, "-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Constant) and not isinstance(a, Constant):
        a, b = b, a
    if isinstance(a, Constant):
        if isinstance(b, Constant):
            return constant(a.value * b.value)
        if a.value == 0.0:
            return ZERO
        if a.value == 1.0:
            return b
        if a.value == -1.0:
            return neg(b)
        if isinstance(b, Binary) and b.op == "*" and isinstance(b.left, Constant):
            return mul(constant(a.value * b.left.value), b.right)
    if isinstance(a, Unary) and a.op == "-":
        return neg(mul(a.child, b))
    if isinstance(b, Unary) and b.op == "-":
        return neg(mul(a, b.child))
    return _nodo(Binary, "*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Constant) and b.value != 0.0:
        if isinstance(a, Constant):
            return constant(a.value / b.value)
        if b.value == 1.0:
            return a
        return mul(constant(1.0 / b.value), a)
    if _es_constante(a, 0.0):
        return ZERO
    if isinstance(a, Unary) and a.op == "-":
        return neg(div(a.child, b))
    return _nodo(Binary, "/", a, b)


def power(a: Expr, exponent: float) -> Expr:
    exponent = float(exponent)
    if exponent == 0.0:
        return ONE
    if exponent == 1.0:
        return a
    if isinstance(a, Constant):
        try:
            valor = a.value ** exponent
        except (ZeroDivisionError, OverflowError):
            valor = None
        if isinstance(valor, float):
            plegado = _plegar(valor)
            if plegado is not None:
                return plegado
    return _nodo(Binary, "^", a, constant(exponent))


def call(func: str, a: Expr) -> Expr:
    if isinstance(a, Constant):
        with np.errstate(all="ignore"):
            valor = float(FUNCTIONS[func](a.value))
        plegado = _plegar(valor)
        if plegado is not None:
            return plegado
    return _nodo(Call, func, a)


# ============================================================================
# ANALIZADOR
# ============================================================================

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int  # en bytes


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenizar(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"Carácter inesperado '{text[pos]}'",
                                 _byte_offset(text, pos), "un token válido")
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    """Descenso recursivo sobre la gramática del encabezado"""

    ATOMO_ESPERADO = "número, s, t, llamada a función o '('"

    def __init__(self, text: str):
        self.tokens = _tokenizar(text)
        self.i = 0

    @property
    def actual(self) -> _Token:
        return self.tokens[self.i]

    def _consumir(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _es_op(self, *ops) -> bool:
        return self.actual.kind == "op" and self.actual.text in ops

    def _esperar_op(self, op: str):
        if not self._es_op(op):
            tok = self.actual
            raise DSLSyntaxError(f"Token inesperado '{tok.text or 'fin'}'", tok.offset, f"'{op}'")
        self._consumir()

    def parse(self) -> Expr:
        e = self.expr()
        if self.actual.kind != "end":
            tok = self.actual
            raise DSLSyntaxError(f"Sobra texto desde '{tok.text}'", tok.offset,
                                 "operador o fin de la expresión")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self._es_op("+", "-"):
            op = self._consumir().text
            e = _nodo(Binary, op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self._es_op("*", "/"):
            op = self._consumir().text
            e = _nodo(Binary, op, e, self.factor())
        return e

    def factor(self) -> Expr:
        if self._es_op("-"):
            self._consumir()
            return _nodo(Unary, "-", self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._es_op("^"):
            self._consumir()
            signo = 1.0
            if self._es_op("-"):
                self._consumir()
                signo = -1.0
            tok = self.actual
            if tok.kind != "number":
                raise DSLSyntaxError("El exponente debe ser constante", tok.offset, "número")
            self._consumir()
            return _nodo(Binary, "^", base, constant(signo * float(tok.text)))
        return base

    def atom(self) -> Expr:
        tok = self.actual
        if tok.kind == "number":
            self._consumir()
            return constant(float(tok.text))
        if tok.kind == "ident":
            self._consumir()
            if self._es_op("("):
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(tok.text, tok.offset)
                self._consumir()
                arg = self.expr()
                self._esperar_op(")")
                return _nodo(Call, tok.text, arg)
            if tok.text not in VARIABLES:
                raise UnknownVariable(tok.text, tok.offset)
            return variable(tok.text)
        if self._es_op("("):
            self._consumir()
            e = self.expr()
            self._esperar_op(")")
            return e
        raise DSLSyntaxError(f"Token inesperado '{tok.text or 'fin'}'", tok.offset,
                             self.ATOMO_ESPERADO)


def parse(text: str) -> Expr:
    """
    Analiza una expresión en s y t.

    Raises:
        DSLSyntaxError, UnknownFunction, UnknownVariable
    """
    if not text or not text.strip():
        raise DSLSyntaxError("Expresión vacía", 0, _Parser.ATOMO_ESPERADO)
    return _Parser(text).parse()


# ============================================================================
# IMPRESIÓN
# ============================================================================

def _numero_texto(v: float) -> str:
    return repr(float(v))


def to_text(e: Expr) -> str:
    """Texto totalmente parentizado que `parse` reconstruye con igual valor"""
    if isinstance(e, Constant):
        texto = _numero_texto(e.value)
        return f"({texto})" if e.value < 0 else texto
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Unary):
        return f"(-{to_text(e.child)})"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if e.op == "^":
        return f"({to_text(e.left)}^{_numero_texto(e.right.value)})"
    return f"({to_text(e.left)} {e.op} {to_text(e.right)})"


# ============================================================================
# EVALUACIÓN
# ============================================================================

def _evaluar(e: Expr, s: Numero, t: Numero, memo: dict) -> Numero:
    clave = id(e)
    if clave in memo:
        return memo[clave]

    if isinstance(e, Constant):
        valor = e.value
    elif isinstance(e, Variable):
        valor = s if e.name == "s" else t
    elif isinstance(e, Unary):
        valor = -_evaluar(e.child, s, t, memo)
    elif isinstance(e, Call):
        x = _evaluar(e.arg, s, t, memo)
        if e.func == "log" and np.any(np.asarray(x) <= 0):
            raise DomainError("log de argumento no positivo", e)
        if e.func == "sqrt" and np.any(np.asarray(x) < 0):
            raise DomainError("sqrt de argumento negativo", e)
        valor = FUNCTIONS[e.func](x)
        if not np.all(np.isfinite(valor)):
            raise DomainError("Resultado no finito", e)
    else:
        a = _evaluar(e.left, s, t, memo)
        if e.op == "^":
            p = e.right.value
            if not float(p).is_integer() and np.any(np.asarray(a) < 0):
                raise DomainError("Potencia fraccionaria de base negativa", e)
            if p < 0 and np.any(np.asarray(a) == 0):
                raise DomainError("Potencia negativa de cero", e)
            valor = np.power(a, p)
        else:
            b = _evaluar(e.right, s, t, memo)
            if e.op == "+":
                valor = a + b
            elif e.op == "-":
                valor = a - b
            elif e.op == "*":
                valor = a * b
            else:
                if np.any(np.asarray(b) == 0):
                    raise DomainError("División por cero", e)
                valor = a / b
        if not np.all(np.isfinite(valor)):
            raise DomainError("Resultado no finito", e)

    memo[clave] = valor
    return valor


def evaluate(e: Expr, s: Numero, t: Numero) -> Numero:
    """
    Evalúa e en (s, t); s y t pueden ser escalares o arreglos que se difunden.

    Raises:
        DomainError: con la subexpresión culpable
    """
    with np.errstate(all="ignore"):
        valor = _evaluar(e, s, t, {})
    if np.ndim(valor) == 0 and np.ndim(s) == 0 and np.ndim(t) == 0:
        return float(valor)
    forma = np.broadcast(np.asarray(s), np.asarray(t)).shape
    return np.broadcast_to(np.asarray(valor, dtype=float), forma).copy()


def evaluate_many(exprs: Sequence[Expr], s: Numero, t: Numero) -> np.ndarray:
    """
    Evalúa varias expresiones con memo compartido.

    Returns:
        arreglo de forma broadcast(s, t).shape + (len(exprs),)
    """
    forma = np.broadcast(np.asarray(s), np.asarray(t)).shape
    memo: dict = {}
    with np.errstate(all="ignore"):
        valores = [_evaluar(e, s, t, memo) for e in exprs]
    return np.stack([np.broadcast_to(np.asarray(v, dtype=float), forma) for v in valores], axis=-1)


# ============================================================================
# DERIVACIÓN SIMBÓLICA
# ============================================================================

DERIVATIVE_CACHE_SIZE = 4096


@singledispatch
def _derivar(e: Expr, var: str) -> Expr:
    raise TypeError(f"Nodo no soportado: {type(e).__name__}")


@_derivar.register(Constant)
def _(e: Constant, var: str) -> Expr:
    return ZERO


@_derivar.register(Variable)
def _(e: Variable, var: str) -> Expr:
    return ONE if e.name == var else ZERO


@_derivar.register(Unary)
def _(e: Unary, var: str) -> Expr:
    return neg(differentiate(e.child, var))


@_derivar.register(Binary)
def _(e: Binary, var: str) -> Expr:
    u, v = e.left, e.right
    du = differentiate(u, var)
    if e.op == "+":
        return add(du, differentiate(v, var))
    if e.op == "-":
        return sub(du, differentiate(v, var))
    if e.op == "*":
        return add(mul(du, v), mul(u, differentiate(v, var)))
    if e.op == "/":
        dv = differentiate(v, var)
        if dv is ZERO:
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2.0))
    # u^p con p constante
    p = v.value
    return mul(mul(constant(p), power(u, p - 1.0)), du)


@_derivar.register(Call)
def _(e: Call, var: str) -> Expr:
    u = e.arg
    du = differentiate(u, var)
    if du is ZERO:
        return ZERO
    f = e.func
    if f == "sin":
        externa = call("cos", u)
    elif f == "cos":
        externa = neg(call("sin", u))
    elif f == "tan":
        externa = power(call("cos", u), -2.0)
    elif f == "sinh":
        externa = call("cosh", u)
    elif f == "cosh":
        externa = call("sinh", u)
    elif f == "tanh":
        externa = power(call("cosh", u), -2.0)
    elif f == "exp":
        externa = e
    elif f == "log":
        return div(du, u)
    else:  # sqrt
        return div(du, mul(constant(2.0), e))
    return mul(externa, du)


def differentiate(e: Expr, var: str) -> Expr:
    """Derivada simbólica exacta respecto de 's' o 't'"""
    if var not in VARIABLES:
        raise UnknownVariable(var, 0)
    return _derivada_cacheada(e, var)


@lru_cache(maxsize=DERIVATIVE_CACHE_SIZE)
def _derivada_cacheada(e: Expr, var: str) -> Expr:
    return _derivar(e, var)


def differentiate_n(e: Expr, var: str, n: int) -> Expr:
    for _ in range(n):
        e = differentiate(e, var)
    return e


# ============================================================================
# VECTORES DE EXPRESIONES
# ============================================================================

COMPONENT_KEYS = ("x_m1", "x_0", "x_1", "x_2")


@dataclass(frozen=True)
class ExprVector4:
    """Las cuatro componentes (x₋₁, x₀, x₁, x₂) de una inmersión"""
    x_m1: Expr
    x_0: Expr
    x_1: Expr
    x_2: Expr

    @classmethod
    def parse(cls, texts: Union[Sequence[str], Dict[str, str]]) -> "ExprVector4":
        """
        Analiza las cuatro componentes; los errores se re-lanzan con la clave.
        """
        if isinstance(texts, dict):
            texts = [texts[k] for k in COMPONENT_KEYS]
        if len(texts) != 4:
            raise ValueError("Se requieren exactamente 4 expresiones")
        componentes = []
        for clave, texto in zip(COMPONENT_KEYS, texts):
            try:
                componentes.append(parse(texto))
            except ExprError as e:
                e.key = clave
                raise
        return cls(*componentes)

    @property
    def components(self) -> Tuple[Expr, Expr, Expr, Expr]:
        return (self.x_m1, self.x_0, self.x_1, self.x_2)

    def differentiate(self, var: str, n: int = 1) -> "ExprVector4":
        return ExprVector4(*(differentiate_n(c, var, n) for c in self.components))

    def evaluate(self, s: Numero, t: Numero) -> np.ndarray:
        """Arreglo (..., 4) con la difusión de s y t"""
        return evaluate_many(self.components, s, t)

    def to_texts(self) -> Dict[str, str]:
        return {k: to_text(c) for k, c in zip(COMPONENT_KEYS, self.components)}


def evaluate_vectors(vectors: Iterable[ExprVector4], s: Numero, t: Numero) -> np.ndarray:
    """
    Evalúa varios ExprVector4 con memo compartido.

    Returns:
        arreglo (k, ..., 4) con k = número de vectores
    """
    vectors = list(vectors)
    exprs = [c for v in vectors for c in v.components]
    valores = evaluate_many(exprs, s, t)
    forma = valores.shape[:-1]
    valores = valores.reshape(forma + (len(vectors), 4))
    return np.moveaxis(valores, -2, 0)
