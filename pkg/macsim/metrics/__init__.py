# macsim - metrics subpackage
