"""SGD with momentum and decoupled weight decay.

The L2 regularization term of the training objective is realized here as
weight decay on kernel parameters (never biases); reported loss values
contain only the data term.
"""


def sgd_step(params, config):
    """Apply one update to every parameter, then clear the gradients.

    v <- momentum * v - lr * (grad + wd * value)   (wd = 0 for biases)
    value <- value + v
    """
    for p in params:
        wd = 0.0 if p.is_bias else config.weight_decay
        p.velocity *= config.momentum
        p.velocity -= config.learning_rate * (p.grad + wd * p.value)
        p.value += p.velocity
        p.zero_grad()
